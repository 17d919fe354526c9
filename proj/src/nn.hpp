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

#ifndef UNISUM_NN_HPP_
#define UNISUM_NN_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "diffcore.hpp"

namespace unisum {

// Uniform [-scale, scale] initializer drawing from a shared engine.
class Initializer {
 public:
  Initializer(std::uint64_t seed, double scale) : rng_(seed), scale_(scale) {}
  Tensor uniform(Shape shape);
  Tensor zeros(Shape shape) { return Tensor(shape, 0.0); }

 private:
  std::mt19937_64 rng_;
  double scale_;
};

// GRU cell: z,r = sigmoid(x Wx[:, :2H] + h Uzr + b[:2H]),
// n = tanh(x Wx[:, 2H:] + (r*h) Un + b[2H:]), h' = (1-z) n + z h.
struct GruParams {
  int wx = -1, uzr = -1, un = -1, b = -1;
  int hidden = 0;

  static GruParams create(ParamSet& ps, Initializer& init, const std::string& prefix, int input, int hidden);
};

Var gru_step(Graph& g, const GruParams& p, Var x, Var h);

// LSTM cell over [x, h] with gate order input, forget, output, candidate.
struct LstmParams {
  int w = -1, b = -1;
  int hidden = 0;

  static LstmParams create(ParamSet& ps, Initializer& init, const std::string& prefix, int input, int hidden);
};

struct LstmState {
  Var h;
  Var c;
};

LstmState lstm_step(Graph& g, const LstmParams& p, Var x, LstmState s);

Var zeros(Graph& g, int n);

}  // namespace unisum

#endif  // UNISUM_NN_HPP_
