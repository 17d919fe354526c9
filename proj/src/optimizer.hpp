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

#ifndef UNISUM_OPTIMIZER_HPP_
#define UNISUM_OPTIMIZER_HPP_

#include <functional>

#include "diffcore.hpp"

namespace unisum {

// Adagrad with global-norm clipping:
//   g <- g * min(1, clip / |g|);  acc += g^2;  p -= lr * g / (sqrt(acc) + eps)
struct AdagradState {
  double lr = 0.15;
  double eps = 1e-8;
  double clip_norm = 2.0;  // <= 0 disables clipping
  GradSet accumulators;

  static AdagradState create(const ParamSet& params, double lr, double eps, double clip_norm);
};

// Parameters the step may touch; the rest stay bit-identical.
using ParamMask = std::function<bool(const std::string& name)>;

double global_norm(const ParamSet& params, const GradSet& grads, const ParamMask& mask = {});

// Returns the pre-clipping gradient norm. A non-finite gradient raises
// NumericError before anything is modified.
double adagrad_step(ParamSet& params, const GradSet& grads, AdagradState& state, const ParamMask& mask = {});

}  // namespace unisum

#endif  // UNISUM_OPTIMIZER_HPP_
