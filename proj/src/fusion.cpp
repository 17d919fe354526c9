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

#include "fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace unisum {

namespace {

void check_alignment(std::size_t alpha_size, std::size_t beta_size, std::span<const int> sentence_of) {
  if (alpha_size != sentence_of.size())
    throw ShapeError("word attention has " + std::to_string(alpha_size) + " entries for " +
                     std::to_string(sentence_of.size()) + " words");
  for (int n : sentence_of)
    if (n < 0 || static_cast<std::size_t>(n) >= beta_size)
      throw ShapeError("word mapped to sentence " + std::to_string(n) + " of " + std::to_string(beta_size));
}

int clamp_k(int k, std::size_t m) {
  if (k < 1) throw ConfigError("inconsistency loss needs K >= 1");
  if (static_cast<std::size_t>(k) > m) {
    warn("K=" + std::to_string(k) + " exceeds article length " + std::to_string(m) + "; clamping");
    return static_cast<int>(m);
  }
  return k;
}

}  // namespace

std::vector<double> combine(std::span<const double> alpha, std::span<const double> beta,
                            std::span<const int> sentence_of) {
  check_alignment(alpha.size(), beta.size(), sentence_of);
  const double mass = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  if (std::abs(mass - 1.0) > 1e-6) throw NumericError("word attention is off the simplex (sum " + std::to_string(mass) + ")");
  // A constant sentence weight cancels in the renormalization.
  const double first = alpha.empty() ? 0.0 : beta[static_cast<std::size_t>(sentence_of[0])];
  if (first > 0.0 && std::all_of(sentence_of.begin(), sentence_of.end(),
                                 [&](int n) { return beta[static_cast<std::size_t>(n)] == first; }))
    return std::vector<double>(alpha.begin(), alpha.end());
  std::vector<double> out(alpha.size());
  double denom = 0.0;
  for (std::size_t m = 0; m < alpha.size(); ++m) denom += out[m] = alpha[m] * beta[static_cast<std::size_t>(sentence_of[m])];
  if (!(denom > 0.0)) throw DegenerateAttention("all word/sentence attention products are zero");
  for (auto& v : out) v /= denom;
  return out;
}

Var combine(Var alpha, Var beta, std::span<const int> sentence_of) {
  check_alignment(alpha.value().size(), beta.value().size(), sentence_of);
  Var products = alpha * gather(beta, std::vector<int>(sentence_of.begin(), sentence_of.end()));
  Var denom = sum(products);
  if (!(denom.item() > 0.0)) throw DegenerateAttention("all word/sentence attention products are zero");
  return div(products, denom);
}

Var combine_or_raw(Var alpha, Var beta, std::span<const int> sentence_of) {
  try {
    return combine(alpha, beta, sentence_of);
  } catch (const DegenerateAttention& e) {
    warn(std::string(e.what()) + "; using raw word attention");
    return alpha;
  }
}

std::vector<int> top_k(std::span<const double> values, int k) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto kk = static_cast<std::ptrdiff_t>(std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), values.size()));
  std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] != values[static_cast<std::size_t>(b)]
               ? values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)]
               : a < b;
  });
  idx.resize(static_cast<std::size_t>(kk));
  return idx;
}

double inconsistency_loss(std::span<const std::vector<double>> alphas, std::span<const double> beta,
                          std::span<const int> sentence_of, int k) {
  if (alphas.empty()) throw ConfigError("inconsistency loss needs at least one decoder step");
  const int kk = clamp_k(k, sentence_of.size());
  double total = 0.0;
  for (const auto& alpha : alphas) {
    check_alignment(alpha.size(), beta.size(), sentence_of);
    double acc = 0.0;
    for (int m : top_k(alpha, kk))
      acc += alpha[static_cast<std::size_t>(m)] * beta[static_cast<std::size_t>(sentence_of[static_cast<std::size_t>(m)])];
    total += std::log(std::max(acc / kk, kLogClamp));
  }
  return -total / static_cast<double>(alphas.size());
}

Var inconsistency_loss(std::span<const Var> alphas, Var beta, std::span<const int> sentence_of, int k) {
  if (alphas.empty()) throw ConfigError("inconsistency loss needs at least one decoder step");
  const int kk = clamp_k(k, sentence_of.size());
  std::vector<Var> terms;
  terms.reserve(alphas.size());
  for (const Var& alpha : alphas) {
    check_alignment(alpha.value().size(), beta.value().size(), sentence_of);
    std::vector<int> words = top_k(alpha.value().data, kk);
    std::vector<int> sentences;
    sentences.reserve(words.size());
    for (int m : words) sentences.push_back(sentence_of[static_cast<std::size_t>(m)]);
    Var products = gather(alpha, words) * gather(beta, sentences);
    terms.push_back(log(mean(products)));
  }
  return scale(mean(concat(terms)), -1.0);
}

InconsistencyRate inconsistency_rate(std::span<const std::vector<double>> alphas, std::span<const double> beta,
                                     std::span<const int> sentence_of) {
  InconsistencyRate out;
  if (alphas.empty()) return out;
  if (beta.empty()) throw ShapeError("inconsistency rate needs sentence attention");
  const double mean_beta = std::accumulate(beta.begin(), beta.end(), 0.0) / static_cast<double>(beta.size());
  for (std::size_t t = 0; t < alphas.size(); ++t) {
    check_alignment(alphas[t].size(), beta.size(), sentence_of);
    int best = top_k(alphas[t], 1).front();
    // Rounding slack so that a uniform beta never reads as below its own mean.
    if (beta[static_cast<std::size_t>(sentence_of[static_cast<std::size_t>(best)])] < mean_beta - 1e-12 * std::max(1.0, mean_beta))
      out.steps.push_back(static_cast<int>(t));
  }
  out.rate = static_cast<double>(out.steps.size()) / static_cast<double>(alphas.size());
  return out;
}

}  // namespace unisum
