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

#include "optimizer.hpp"

#include <cmath>

#include "common.hpp"

namespace unisum {

AdagradState AdagradState::create(const ParamSet& params, double lr, double eps, double clip_norm) {
  return {lr, eps, clip_norm, zeros_like(params)};
}

double global_norm(const ParamSet& params, const GradSet& grads, const ParamMask& mask) {
  double sq = 0.0;
  for (int i = 0; i < params.size(); ++i) {
    if (mask && !mask(params.name(i))) continue;
    for (double g : grads[static_cast<std::size_t>(i)].data) sq += g * g;
  }
  return std::sqrt(sq);
}

double adagrad_step(ParamSet& params, const GradSet& grads, AdagradState& state, const ParamMask& mask) {
  if (grads.size() != static_cast<std::size_t>(params.size()) ||
      state.accumulators.size() != static_cast<std::size_t>(params.size()))
    throw ShapeError("adagrad: gradient/accumulator count does not match the parameters");
  for (int i = 0; i < params.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (grads[k].size() != params[i].size() || state.accumulators[k].size() != params[i].size())
      throw ShapeError("adagrad: shape mismatch for " + params.name(i));
    if (mask && !mask(params.name(i))) continue;
    for (double g : grads[k].data)
      if (!std::isfinite(g)) throw NumericError("adagrad: non-finite gradient for " + params.name(i));
  }
  const double norm = global_norm(params, grads, mask);
  const double factor = state.clip_norm > 0.0 && norm > state.clip_norm ? state.clip_norm / norm : 1.0;
  for (int i = 0; i < params.size(); ++i) {
    if (mask && !mask(params.name(i))) continue;
    const auto k = static_cast<std::size_t>(i);
    auto& p = params[i].data;
    auto& acc = state.accumulators[k].data;
    const auto& g = grads[k].data;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j] * factor;
      acc[j] += gj * gj;
      p[j] -= state.lr * gj / (std::sqrt(acc[j]) + state.eps);
    }
  }
  return norm;
}

}  // namespace unisum
