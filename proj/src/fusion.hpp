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

#ifndef UNISUM_FUSION_HPP_
#define UNISUM_FUSION_HPP_

#include <span>
#include <vector>

#include "common.hpp"
#include "diffcore.hpp"

namespace unisum {

// Raised when every word/sentence attention product is zero.
class DegenerateAttention : public NumericError {
 public:
  using NumericError::NumericError;
};

// Sentence-modulated word attention:
//   fused[m] = alpha[m] * beta[sentence_of[m]] / sum_m alpha[m] * beta[sentence_of[m]].
std::vector<double> combine(std::span<const double> alpha, std::span<const double> beta,
                            std::span<const int> sentence_of);
Var combine(Var alpha, Var beta, std::span<const int> sentence_of);

// Same as combine() but returns alpha unchanged (and warns) when degenerate.
Var combine_or_raw(Var alpha, Var beta, std::span<const int> sentence_of);

// Indices of the k largest entries, ties resolved toward lower index.
std::vector<int> top_k(std::span<const double> values, int k);

// Penalizes steps whose top-K attended words sit in sentences with low
// extraction probability:
//   L = -(1/T) sum_t log( (1/|K|) sum_{m in K_t} alpha_t[m] * beta[n(m)] ).
// K_t ranks the raw word attention and is treated as constant for gradients.
// K larger than the article is clamped with a warning.
double inconsistency_loss(std::span<const std::vector<double>> alphas, std::span<const double> beta,
                          std::span<const int> sentence_of, int k);
Var inconsistency_loss(std::span<const Var> alphas, Var beta, std::span<const int> sentence_of, int k);

struct InconsistencyRate {
  double rate = 0.0;
  std::vector<int> steps;  // inconsistent step indices (0-based)
};

// A step is inconsistent when the sentence holding the most-attended word
// has beta strictly below the mean beta.
InconsistencyRate inconsistency_rate(std::span<const std::vector<double>> alphas, std::span<const double> beta,
                                     std::span<const int> sentence_of);

}  // namespace unisum

#endif  // UNISUM_FUSION_HPP_
