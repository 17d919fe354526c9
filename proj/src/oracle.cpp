// Copyright 2026 The unisum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oracle.hpp"

#include <algorithm>
#include <numeric>

#include "common.hpp"
#include "rouge.hpp"

namespace unisum {

namespace {
constexpr double kGainTolerance = 1e-12;
}  // namespace

double informativity(std::span<const int> selected, const Article& article, const Tokens& reference) {
  if (selected.empty() || reference.empty()) return 0.0;
  std::vector<int> order(selected.begin(), selected.end());
  std::sort(order.begin(), order.end());
  Tokens text;
  for (int n : order) {
    if (n < 0 || static_cast<std::size_t>(n) >= article.num_sentences())
      throw DataError("informativity: sentence index " + std::to_string(n) + " out of range");
    const Span& s = article.spans[static_cast<std::size_t>(n)];
    text.insert(text.end(), article.tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
                article.tokens.begin() + static_cast<std::ptrdiff_t>(s.end));
  }
  return rouge_l(text, reference).recall;
}

LabelVector extract_labels(const Article& article, const Tokens& reference) {
  const std::size_t n = article.num_sentences();
  LabelVector labels(n, 0);
  if (reference.empty()) return labels;

  std::vector<double> single(n);
  for (std::size_t i = 0; i < n; ++i) {
    int idx = static_cast<int>(i);
    single[i] = informativity(std::span<const int>(&idx, 1), article, reference);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return single[a] > single[b]; });

  std::vector<int> chosen;
  double current = 0.0;
  for (int cand : order) {
    chosen.push_back(cand);
    double score = informativity(chosen, article, reference);
    if (score > current + kGainTolerance) {
      current = score;
      labels[static_cast<std::size_t>(cand)] = 1;
    } else {
      chosen.pop_back();
    }
  }
  return labels;
}

std::vector<int> selected_indices(const LabelVector& labels) {
  std::vector<int> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i]) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace unisum
