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

#include "config.hpp"

#include "common.hpp"

namespace unisum {

namespace {

// Plain fields, serialized under their own names.
#define UNISUM_CONFIG_FIELDS(X)                                                                        \
  X(lambda_ext) X(lambda_abs) X(lambda_cov) X(lambda_inc) X(top_k) X(lr_pretrain) X(lr_e2e)            \
  X(batch_ext) X(batch_abs) X(batch_e2e) X(clip_norm) X(adagrad_eps) X(iters_ext) X(iters_abs)         \
  X(iters_coverage) X(iters_two_stage) X(iters_e2e) X(eval_interval) X(eval_records) X(patience)       \
  X(valid_fraction) X(ext_max_sentences) X(ext_max_sentence_tokens) X(abs_max_source) X(e2e_max_source) \
  X(max_summary) X(coverage) X(beta_threshold) X(vocab_size) X(embed_dim) X(ext_hidden) X(abs_hidden)  \
  X(init_scale) X(max_len) X(beam_width) X(seed) X(preset)

constexpr const char* kRegimeNames[] = {"pretrain-ext", "pretrain-abs", "two-stage", "e2e"};

}  // namespace

const char* regime_name(Regime r) { return kRegimeNames[static_cast<int>(r)]; }

Regime parse_regime(const std::string& name) {
  for (int i = 0; i < 4; ++i)
    if (name == kRegimeNames[i]) return static_cast<Regime>(i);
  throw ConfigError("unknown regime '" + name + "' (expected pretrain-ext, pretrain-abs, two-stage or e2e)");
}

TrainConfig TrainConfig::desk() { return TrainConfig{}; }

TrainConfig TrainConfig::paper() {
  TrainConfig c;
  c.preset = "paper";
  c.iters_ext = 27000;
  c.iters_abs = 88000;
  c.iters_coverage = 1000;
  c.iters_two_stage = 10000;
  c.iters_e2e = 50000;
  c.eval_interval = 1000;
  c.eval_records = 0;
  c.vocab_size = 50000;
  c.embed_dim = 128;
  c.ext_hidden = 200;
  c.abs_hidden = 256;
  c.beam_width = 4;
  return c;
}

TrainConfig TrainConfig::preset_named(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "paper") return paper();
  throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  for (double l : {lambda_ext, lambda_abs, lambda_cov, lambda_inc})
    if (!(l >= 0.0)) fail("loss weights must be nonnegative");
  if (top_k < 1) fail("top_k must be at least 1");
  if (!(lr_pretrain > 0.0) || !(lr_e2e > 0.0)) fail("learning rates must be positive");
  if (batch_ext < 1 || batch_abs < 1 || batch_e2e < 1) fail("batch sizes must be positive");
  if (!(clip_norm > 0.0) || !(adagrad_eps > 0.0)) fail("clip_norm and adagrad_eps must be positive");
  if (iters_ext < 0 || iters_abs < 0 || iters_coverage < 0 || iters_two_stage < 0 || iters_e2e < 0)
    fail("iteration budgets must be nonnegative");
  if (eval_interval < 1) fail("eval_interval must be positive");
  if (eval_records < 0 || patience < 0) fail("eval_records and patience must be nonnegative");
  if (!(valid_fraction >= 0.0 && valid_fraction < 1.0)) fail("valid_fraction must lie in [0,1)");
  if (ext_max_sentences < 1 || ext_max_sentence_tokens < 1 || abs_max_source < 1 || e2e_max_source < 1 ||
      max_summary < 1)
    fail("truncation limits must be positive");
  if (!(beta_threshold >= 0.0 && beta_threshold <= 1.0)) fail("beta_threshold must lie in [0,1]");
  if (vocab_size <= kNumReserved) fail("vocab_size must exceed the reserved tokens");
  if (embed_dim < 1 || ext_hidden < 1 || abs_hidden < 1) fail("model dimensions must be positive");
  if (!(init_scale >= 0.0)) fail("init_scale must be nonnegative");
  if (max_len < 0) fail("max_len must be nonnegative");
  if (beam_width < 1) fail("beam_width must be at least 1");
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j;
  j["regime"] = regime_name(regime);
#define X(f) j[#f] = f;
  UNISUM_CONFIG_FIELDS(X)
#undef X
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "regime") {
        c.regime = parse_regime(value.get<std::string>());
        continue;
      }
      bool known = false;
#define X(f)                                  \
  if (key == #f) {                            \
    c.f = value.get<decltype(c.f)>();         \
    known = true;                             \
  }
      UNISUM_CONFIG_FIELDS(X)
#undef X
      if (!known) throw ConfigError("config: unknown field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string TrainConfig::fingerprint() const { return unisum::fingerprint(to_json().dump()); }

double TrainConfig::learning_rate() const { return regime == Regime::kEnd2End ? lr_e2e : lr_pretrain; }

int TrainConfig::batch_size() const {
  switch (regime) {
    case Regime::kPretrainExt: return batch_ext;
    case Regime::kEnd2End: return batch_e2e;
    default: return batch_abs;
  }
}

int TrainConfig::iterations() const {
  switch (regime) {
    case Regime::kPretrainExt: return iters_ext;
    case Regime::kPretrainAbs: return iters_abs;
    case Regime::kTwoStage: return iters_two_stage;
    default: return iters_e2e;
  }
}

int TrainConfig::total_iterations() const {
  return iterations() + (regime == Regime::kPretrainAbs && coverage ? iters_coverage : 0);
}

TruncationLimits TrainConfig::ext_limits() const {
  return {static_cast<std::size_t>(ext_max_sentences), static_cast<std::size_t>(ext_max_sentence_tokens),
          static_cast<std::size_t>(e2e_max_source)};
}

TruncationLimits TrainConfig::abs_limits() const {
  return {static_cast<std::size_t>(ext_max_sentences), static_cast<std::size_t>(ext_max_sentence_tokens),
          static_cast<std::size_t>(abs_max_source)};
}

TruncationLimits TrainConfig::e2e_limits() const { return ext_limits(); }

ModelDims TrainConfig::dims(int vocab) const { return {vocab, embed_dim, ext_hidden, abs_hidden, init_scale}; }

}  // namespace unisum
