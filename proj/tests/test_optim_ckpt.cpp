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

#include <cmath>
#include <limits>

#include "common.hpp"
#include "checkpoint.hpp"
#include "config.hpp"
#include "doctest.h"
#include "optimizer.hpp"

using namespace unisum;

namespace {

ParamSet two_params() {
  ParamSet ps;
  ps.add("a.w", Tensor::vec({0.0, 0.0}));
  ps.add("b.w", Tensor::vec({1.0}));
  return ps;
}

Model tiny_model() {
  std::vector<SummaryPair> corpus{{segment(tokenize("a b c . d e .")), tokenize("a d")}};
  Vocab v = Vocab::build(corpus, 50);
  return Model(ModelDims{v.size(), 4, 3, 3, 0.2}, v, 3);
}

}  // namespace

TEST_CASE("adagrad update rule") {
  ParamSet ps = two_params();
  AdagradState st = AdagradState::create(ps, 0.1, 1e-8, 0.0);
  GradSet g = zeros_like(ps);
  adagrad_step(ps, g, st);
  CHECK(ps[0].data == std::vector<double>{0.0, 0.0});
  CHECK(ps[1].data == std::vector<double>{1.0});

  ParamSet one;
  one.add("p", Tensor::scalar(0.0));
  AdagradState s1 = AdagradState::create(one, 0.1, 1e-8, 0.0);
  GradSet g1 = zeros_like(one);
  g1[0].data[0] = 1.0;
  adagrad_step(one, g1, s1);
  CHECK(one[0].item() == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-15));
  const double first = one[0].item();
  adagrad_step(one, g1, s1);
  CHECK(std::abs(one[0].item() - first) < std::abs(first));
}

TEST_CASE("adagrad clips by the global norm and respects the mask") {
  ParamSet ps = two_params();
  AdagradState st = AdagradState::create(ps, 0.5, 1e-8, 2.0);
  GradSet g = zeros_like(ps);
  g[0].data = {3.0, 4.0};
  g[1].data = {12.0};
  CHECK(global_norm(ps, g) == doctest::Approx(13.0));
  CHECK(global_norm(ps, g, [](const std::string& n) { return n.rfind("a.", 0) == 0; }) == doctest::Approx(5.0));
  const double norm = adagrad_step(ps, g, st, [](const std::string& n) { return n.rfind("a.", 0) == 0; });
  CHECK(norm == doctest::Approx(5.0));
  CHECK(ps[1].data == std::vector<double>{1.0});
  // clipped gradient (3,4)*2/5 = (1.2,1.6); first adagrad step moves each entry by ~lr
  CHECK(ps[0].data[0] == doctest::Approx(-0.5));
  CHECK(st.accumulators[0].data[0] == doctest::Approx(1.44));
}

TEST_CASE("non-finite gradients leave parameters untouched") {
  ParamSet ps = two_params();
  AdagradState st = AdagradState::create(ps, 0.1, 1e-8, 2.0);
  GradSet g = zeros_like(ps);
  g[0].data = {1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(adagrad_step(ps, g, st), NumericError);
  CHECK(ps[0].data == std::vector<double>{0.0, 0.0});
  CHECK(st.accumulators[0].data == std::vector<double>{0.0, 0.0});
}

TEST_CASE("config presets and json") {
  TrainConfig d = TrainConfig::desk();
  CHECK(d.lambda_ext == 5.0);
  CHECK(d.top_k == 3);
  CHECK(d.lr_pretrain == 0.15);
  CHECK(d.lr_e2e == 0.01);
  CHECK(d.batch_ext == 64);
  CHECK(d.batch_abs == 16);
  CHECK(d.batch_e2e == 8);
  CHECK(d.clip_norm == 2.0);
  TrainConfig p = TrainConfig::paper();
  CHECK(p.vocab_size == 50000);
  CHECK(p.embed_dim == 128);
  CHECK(p.ext_hidden == 200);
  CHECK(p.abs_hidden == 256);
  CHECK(p.iters_ext == 27000);
  CHECK(p.iters_abs == 88000);
  CHECK(p.iters_coverage == 1000);
  CHECK(p.iters_two_stage == 10000);
  CHECK(p.iters_e2e == 50000);
  CHECK(p.beam_width == 4);

  TrainConfig back = TrainConfig::from_json(p.to_json(), TrainConfig::desk());
  CHECK(back.to_json() == p.to_json());
  CHECK(back.fingerprint() == p.fingerprint());
  CHECK(d.fingerprint() != p.fingerprint());
  CHECK(d.fingerprint().size() == 16);

  CHECK_THROWS_AS(TrainConfig::from_json({{"no_such_field", 1}}, d), ConfigError);
  CHECK_THROWS_AS(TrainConfig::from_json({{"top_k", 0}}, d), ConfigError);
  CHECK_THROWS_AS(TrainConfig::preset_named("huge"), ConfigError);

  TrainConfig abs = d;
  abs.regime = Regime::kPretrainAbs;
  CHECK(abs.total_iterations() == d.iters_abs + d.iters_coverage);
  CHECK(abs.learning_rate() == 0.15);
  CHECK(d.learning_rate() == 0.01);
}

TEST_CASE("checkpoint round trip") {
  Checkpoint ck(tiny_model(), TrainConfig::desk());
  ck.iteration = 42;
  ck.rng_state = "1 2 3";
  ck.info["note"] = "x";
  ck.optimizer.accumulators[0].data[0] = 0.125;
  const std::string bytes = save_checkpoint(ck);
  CHECK(bytes.substr(0, 4) == "USUM");
  Checkpoint back = load_checkpoint_bytes(bytes);
  CHECK(back.iteration == 42);
  CHECK(back.rng_state == "1 2 3");
  CHECK(back.info["note"] == "x");
  CHECK(back.model.vocab() == ck.model.vocab());
  for (int i = 0; i < ck.model.params().size(); ++i) CHECK(back.model.params()[i].data == ck.model.params()[i].data);
  CHECK(save_checkpoint(back) == bytes);

  CHECK_THROWS_AS(load_checkpoint_bytes("XSUM" + bytes.substr(4)), DataError);
  CHECK_THROWS_AS(load_checkpoint_bytes(bytes.substr(0, bytes.size() - 3)), DataError);
  CHECK_THROWS_AS(load_checkpoint_bytes(bytes + "!"), DataError);
  std::string wrong_version = bytes;
  wrong_version[4] = 9;
  CHECK_THROWS_AS(load_checkpoint_bytes(wrong_version), DataError);
}
