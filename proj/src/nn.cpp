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

#include "nn.hpp"

namespace unisum {

Tensor Initializer::uniform(Shape shape) {
  std::uniform_real_distribution<double> dist(-scale_, scale_);
  Tensor t(shape);
  for (auto& v : t.data) v = dist(rng_);
  return t;
}

GruParams GruParams::create(ParamSet& ps, Initializer& init, const std::string& prefix, int input, int hidden) {
  GruParams p;
  p.hidden = hidden;
  p.wx = ps.add(prefix + ".wx", init.uniform(Shape::mat(input, 3 * hidden)));
  p.uzr = ps.add(prefix + ".uzr", init.uniform(Shape::mat(hidden, 2 * hidden)));
  p.un = ps.add(prefix + ".un", init.uniform(Shape::mat(hidden, hidden)));
  p.b = ps.add(prefix + ".b", init.uniform(Shape::vec(3 * hidden)));
  return p;
}

Var gru_step(Graph& g, const GruParams& p, Var x, Var h) {
  const int H = p.hidden;
  Var xw = add(matmul(x, g.param(p.wx)), g.param(p.b));
  Var zr = sigmoid(slice(xw, 0, 2 * H) + matmul(h, g.param(p.uzr)));
  Var z = slice(zr, 0, H);
  Var r = slice(zr, H, 2 * H);
  Var n = tanh(slice(xw, 2 * H, 3 * H) + matmul(r * h, g.param(p.un)));
  return n + z * (h - n);
}

LstmParams LstmParams::create(ParamSet& ps, Initializer& init, const std::string& prefix, int input, int hidden) {
  LstmParams p;
  p.hidden = hidden;
  p.w = ps.add(prefix + ".w", init.uniform(Shape::mat(input + hidden, 4 * hidden)));
  p.b = ps.add(prefix + ".b", init.uniform(Shape::vec(4 * hidden)));
  return p;
}

LstmState lstm_step(Graph& g, const LstmParams& p, Var x, LstmState s) {
  const int H = p.hidden;
  Var gates = add(matmul(concat({x, s.h}), g.param(p.w)), g.param(p.b));
  Var ifo = sigmoid(slice(gates, 0, 3 * H));
  Var cand = tanh(slice(gates, 3 * H, 4 * H));
  Var c = slice(ifo, H, 2 * H) * s.c + slice(ifo, 0, H) * cand;
  Var h = slice(ifo, 2 * H, 3 * H) * tanh(c);
  return {h, c};
}

Var zeros(Graph& g, int n) { return g.constant(Tensor(Shape::vec(n), 0.0)); }

}  // namespace unisum
