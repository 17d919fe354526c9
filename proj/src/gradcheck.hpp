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

#ifndef UNISUM_GRADCHECK_HPP_
#define UNISUM_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "diffcore.hpp"
#include "model.hpp"

namespace unisum {

// A small random model plus one article/reference pair (with an OOV word on
// both sides) for finite-difference checks.
struct ToyProblem {
  Model model;
  IndexedArticle article;
  std::vector<int> labels;
  std::vector<int> targets;  // extended ids, STOP last
};

struct ToyDims {
  int embed = 8;
  int hidden = 8;
  int max_tokens = 12;
  int max_steps = 5;
  double init_scale = 1.0;
};

ToyProblem make_toy_problem(std::uint64_t seed, const ToyDims& dims = {});

struct LossCheck {
  std::string loss;
  GradCheckReport report;
};

// Checks L_ext, L_abs, L_cov, L_inc and the weighted sum of all four against
// central differences.
std::vector<LossCheck> check_all_losses(std::uint64_t seed, double epsilon, double tolerance,
                                        const ToyDims& dims = {});

}  // namespace unisum

#endif  // UNISUM_GRADCHECK_HPP_
