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

// Seeded toy training runs. Slower than the unit tests; kept in their own binary.
#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "checkpoint.hpp"
#include "doctest.h"
#include "evaluate.hpp"
#include "extractor.hpp"
#include "oracle.hpp"
#include "rouge.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

using namespace unisum;

namespace {

struct Data {
  std::vector<SyntheticRecord> records;
  std::vector<SummaryPair> train, valid, test;
};

const Data& data() {
  static const Data d = [] {
    Data out;
    SynthConfig sc;
    sc.num_records = 400;
    out.records = generate_synthetic(sc, 7);
    auto pairs = pairs_of(out.records);
    out.train.assign(pairs.begin(), pairs.begin() + 320);
    out.valid.assign(pairs.begin() + 320, pairs.begin() + 360);
    out.test.assign(pairs.begin() + 360, pairs.end());
    return out;
  }();
  return d;
}

TrainConfig toy_config(Regime r) {
  TrainConfig c = TrainConfig::desk();
  c.regime = r;
  c.iters_ext = 200;
  c.iters_abs = 200;
  c.iters_coverage = 40;
  c.iters_two_stage = 60;
  c.iters_e2e = 60;
  c.eval_interval = 50;
  c.eval_records = 40;
  return c;
}

Checkpoint trained(Regime r, const Checkpoint* init, TrainSummary* summary = nullptr) {
  Checkpoint ck = start_run(toy_config(r), data().train, init);
  auto tr = prepare_examples(ck, data().train);
  auto va = prepare_examples(ck, data().valid);
  Trainer t(ck, tr, va);
  TrainSummary s = t.run();
  if (summary) *summary = s;
  return ck;
}

// The pipeline shared by the later cases.
const Checkpoint& ext_model() {
  static const Checkpoint ck = trained(Regime::kPretrainExt, nullptr);
  return ck;
}
const Checkpoint& abs_model() {
  static const Checkpoint ck = trained(Regime::kPretrainAbs, &ext_model());
  return ck;
}

double train_loss(Checkpoint& ck, std::span<const Example> ex) {
  Trainer t(ck, ex, ex);
  return t.validate().total;
}

}  // namespace

TEST_CASE("extractor pretraining lowers the training loss") {
  Checkpoint fresh = start_run(toy_config(Regime::kPretrainExt), data().train);
  auto tr = prepare_examples(fresh, data().train);
  const double before = train_loss(fresh, tr);
  Checkpoint done = ext_model();
  const double after = train_loss(done, tr);
  CHECK(after < before);
  const auto& hist = done.info["history"];
  CHECK(hist.size() >= 5);  // start, every 50 iterations, end
  double best = 1e300;
  for (const auto& h : hist) best = std::min(best, h["valid_loss"].get<double>());
  CHECK(done.info["best_valid"].get<double>() == best);
}

TEST_CASE("abstracter pretraining sees only the labeled sentences") {
  Checkpoint ck = start_run(toy_config(Regime::kPretrainAbs), data().train, &ext_model());
  auto ex = prepare_examples(ck, data().valid);
  REQUIRE(ex.size() == data().valid.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const auto labels = extract_labels(data().valid[i].article, data().valid[i].reference);
    CHECK(ex[i].source_sentences == selected_indices(labels));
  }
}

TEST_CASE("abstracter pretraining and the coverage phase") {
  Checkpoint fresh = start_run(toy_config(Regime::kPretrainAbs), data().train, &ext_model());
  auto tr = prepare_examples(fresh, data().train);
  const double before = train_loss(fresh, tr);
  TrainSummary s;
  Checkpoint done = trained(Regime::kPretrainAbs, &ext_model(), &s);
  CHECK(train_loss(done, tr) < before);
  REQUIRE(s.coverage_before.has_value());
  REQUIRE(s.coverage_after.has_value());
  CHECK(*s.coverage_after < *s.coverage_before);
  CHECK(done.info["coverage_trained"] == true);
}

TEST_CASE("two-stage training leaves the extractor alone") {
  Checkpoint ck = start_run(toy_config(Regime::kTwoStage), data().train, &abs_model());
  auto ex = prepare_examples(ck, data().train);
  std::vector<Tensor> before;
  for (int i = 0; i < ck.model.params().size(); ++i) before.push_back(ck.model.params()[i]);
  Trainer t(ck, ex, std::span<const Example>(ex).first(10));
  for (int i = 0; i < 5; ++i) t.step();
  bool abs_changed = false;
  for (int i = 0; i < ck.model.params().size(); ++i) {
    const auto& name = ck.model.params().name(i);
    if (Model::is_extractor_param(name)) CHECK(ck.model.params()[i].data == before[static_cast<std::size_t>(i)].data);
    if (Model::is_abstracter_param(name) && ck.model.params()[i].data != before[static_cast<std::size_t>(i)].data)
      abs_changed = true;
  }
  CHECK(abs_changed);

  CHECK(sentences_above(std::vector<double>{0.3, 0.8, 0.6}, 1.0) == std::vector<int>{1});
  TrainConfig strict = toy_config(Regime::kTwoStage);
  strict.beta_threshold = 1.0;
  Checkpoint ck2 = start_run(strict, data().train, &abs_model());
  auto ex2 = prepare_examples(ck2, std::span<const SummaryPair>(data().valid).first(5));
  for (const auto& e : ex2) CHECK(e.source_sentences.size() == 1);
}

TEST_CASE("two-stage model is at least as good as the abstracter on full articles") {
  Checkpoint two = trained(Regime::kTwoStage, &abs_model());
  const double full = evaluate(abs_model(), data().test, DecodeMode::kAbstracter)["abstractive"]["rougeL_f1"];
  const double staged = evaluate(two, data().test, DecodeMode::kTwoStage)["abstractive"]["rougeL_f1"];
  MESSAGE("abstracter on full articles " << full << ", two-stage " << staged);
  CHECK(staged >= full);
}

TEST_CASE("one end-to-end step moves both networks and the parts add up") {
  Checkpoint ck = start_run(toy_config(Regime::kEnd2End), data().train, &abs_model());
  auto ex = prepare_examples(ck, data().train);
  std::vector<Tensor> before;
  for (int i = 0; i < ck.model.params().size(); ++i) before.push_back(ck.model.params()[i]);
  Trainer t(ck, ex, std::span<const Example>(ex).first(10));
  const LossParts p = t.step();
  const TrainConfig& c = ck.config;
  CHECK(std::abs(p.total - (c.lambda_ext * p.ext + c.lambda_abs * p.abs + c.lambda_cov * p.cov + c.lambda_inc * p.inc)) <
        1e-9);
  bool ext_changed = false, abs_changed = false;
  for (int i = 0; i < ck.model.params().size(); ++i) {
    if (ck.model.params()[i].data == before[static_cast<std::size_t>(i)].data) continue;
    const auto& name = ck.model.params().name(i);
    ext_changed = ext_changed || Model::is_extractor_param(name);
    abs_changed = abs_changed || Model::is_abstracter_param(name);
  }
  CHECK(ext_changed);
  CHECK(abs_changed);
}

TEST_CASE("the inconsistency loss lowers the inconsistency rate on toy runs") {
  double rate[2];
  for (int with : {0, 1}) {
    TrainConfig c = toy_config(Regime::kEnd2End);
    c.lambda_inc = with;
    Checkpoint ck = start_run(c, data().train, &abs_model());
    auto tr = prepare_examples(ck, data().train);
    auto va = prepare_examples(ck, data().valid);
    Trainer t(ck, tr, va);
    t.run();
    rate[with] = evaluate(ck, data().test, DecodeMode::kUnified)["inconsistency"]["mean_rate"];
  }
  MESSAGE("R_inc without " << rate[0] << ", with " << rate[1]);
  CHECK(rate[1] < rate[0]);
}

TEST_CASE("resuming from a checkpoint reproduces the next step exactly") {
  Checkpoint ck = start_run(toy_config(Regime::kEnd2End), data().train, &abs_model());
  auto ex = prepare_examples(ck, data().train);
  auto va = std::span<const Example>(ex).first(5);
  Trainer t(ck, ex, va);
  for (int i = 0; i < 3; ++i) t.step();
  const std::string bytes = save_checkpoint(ck);
  const double next = t.step().total;

  Checkpoint resumed = load_checkpoint_bytes(bytes);
  Trainer t2(resumed, ex, va);
  CHECK(t2.step().total == next);
  CHECK(save_checkpoint(resumed) == save_checkpoint(ck));
}

TEST_CASE("oracle row of the report is the informativity of the oracle labels") {
  auto report = evaluate(abs_model(), data().test, DecodeMode::kUnified);
  double sum = 0.0;
  for (const auto& p : data().test) {
    const Article a = truncate(p.article, abs_model().config.ext_limits());
    sum += informativity(selected_indices(extract_labels(a, p.reference)), a, p.reference);
  }
  CHECK(report["oracle"]["rougeL_recall"].get<double>() == doctest::Approx(sum / data().test.size()).epsilon(1e-12));
  CHECK(report["inconsistency"]["per_article"].size() == data().test.size());
  CHECK(evaluate(abs_model(), data().test, DecodeMode::kTwoStage)["inconsistency"].is_null());
}

TEST_CASE("trained extractor ranks salient sentences above the rest") {
  int ordered = 0, total = 0;
  for (std::size_t i = 320; i < data().records.size(); ++i) {
    const auto& r = data().records[i];
    const Article a = truncate(r.pair.article, ext_model().config.ext_limits());
    const auto beta = score_sentences(ext_model().model, index_article(a, ext_model().model.vocab()));
    double lowest_salient = 1.0, highest_other = 0.0;
    for (std::size_t n = 0; n < beta.size(); ++n) {
      const bool salient = std::find(r.salient.begin(), r.salient.end(), static_cast<int>(n)) != r.salient.end();
      if (salient)
        lowest_salient = std::min(lowest_salient, beta[n]);
      else
        highest_other = std::max(highest_other, beta[n]);
    }
    ordered += lowest_salient > highest_other;
    ++total;
  }
  MESSAGE(ordered << " of " << total << " held-out articles ordered");
  CHECK(ordered >= 0.95 * total);
}

TEST_CASE("pretrained abstracter paraphrases the salient sentences") {
  int good = 0;
  const auto& test = data().test;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& r = data().records[360 + i];
    const Article a = truncate(r.pair.article, abs_model().config.ext_limits());
    const Summary s = summarize(abs_model(), select_sentences(a, r.salient), DecodeMode::kAbstracter);
    good += rouge_l(s.tokens, test[i].reference).f1 >= 0.9;
  }
  MESSAGE(good << " of " << test.size() << " summaries at ROUGE-L F1 >= 0.9");
  CHECK(good >= 0.9 * static_cast<double>(test.size()));
}

TEST_CASE("unified model extracts sentences that recall the reference") {
  Checkpoint e2e = trained(Regime::kEnd2End, &abs_model());
  const double recall = evaluate(e2e, data().test, DecodeMode::kUnified)["extractive"]["rougeL_recall"];
  MESSAGE("extracted-sentence ROUGE-L recall " << recall);
  CHECK(recall >= 0.9);
}
