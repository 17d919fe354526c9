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

#include "rouge.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "common.hpp"

namespace unisum {

namespace {

using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> count_grams(std::span<const std::string> tokens, int n) {
  std::map<Gram, std::size_t> counts;
  auto size = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + size <= tokens.size(); ++i) ++counts[Gram(tokens.begin() + i, tokens.begin() + i + size)];
  return counts;
}

std::size_t gram_total(std::size_t len, int n) {
  auto size = static_cast<std::size_t>(n);
  return len >= size ? len - size + 1 : 0;
}

}  // namespace

RougeScore make_score(std::size_t hits, std::size_t reference_count, std::size_t candidate_count) {
  RougeScore s;
  if (reference_count > 0) s.recall = static_cast<double>(hits) / static_cast<double>(reference_count);
  if (candidate_count > 0) s.precision = static_cast<double>(hits) / static_cast<double>(candidate_count);
  if (s.precision + s.recall > 0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference, int n) {
  if (n != 1 && n != 2) throw ConfigError("rouge_n supports n in {1,2}, got " + std::to_string(n));
  auto cand = count_grams(candidate, n);
  auto ref = count_grams(reference, n);
  std::size_t hits = 0;
  for (const auto& [gram, rc] : ref) {
    auto it = cand.find(gram);
    if (it != cand.end()) hits += std::min(rc, it->second);
  }
  return make_score(hits, gram_total(reference.size(), n), gram_total(candidate.size(), n));
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return make_score(lcs_length(candidate, reference), reference.size(), candidate.size());
}

}  // namespace unisum
