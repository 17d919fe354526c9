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

#ifndef UNISUM_CONFIG_HPP_
#define UNISUM_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "corpus.hpp"
#include "json.hpp"
#include "model.hpp"

namespace unisum {

enum class Regime { kPretrainExt, kPretrainAbs, kTwoStage, kEnd2End };

const char* regime_name(Regime r);
Regime parse_regime(const std::string& name);

// Every knob of a run. Serialized as flat JSON; unknown keys are rejected.
struct TrainConfig {
  Regime regime = Regime::kEnd2End;
  std::string preset = "desk";

  // L_e2e = lambda_ext L_ext + lambda_abs L_abs + lambda_cov L_cov + lambda_inc L_inc.
  // The extractor weight is large because it otherwise drifts away from its
  // labels during joint training.
  double lambda_ext = 5.0;
  double lambda_abs = 1.0;
  double lambda_cov = 1.0;
  double lambda_inc = 1.0;
  int top_k = 3;

  double lr_pretrain = 0.15;
  double lr_e2e = 0.01;
  int batch_ext = 64;
  int batch_abs = 16;
  int batch_e2e = 8;
  double clip_norm = 2.0;
  double adagrad_eps = 1e-8;

  int iters_ext = 2000;
  int iters_abs = 4000;
  int iters_coverage = 200;
  int iters_two_stage = 500;
  int iters_e2e = 2000;

  int eval_interval = 100;
  int eval_records = 100;  // validation subset size, 0 = all
  int patience = 0;        // evaluations without improvement before stopping, 0 = never
  double valid_fraction = 0.1;

  // Truncation. The extractor sees at most ext_max_sentences sentences of at
  // most ext_max_sentence_tokens tokens.
  int ext_max_sentences = 50;
  int ext_max_sentence_tokens = 50;
  int abs_max_source = 400;
  int e2e_max_source = 600;
  int max_summary = 100;

  bool coverage = true;
  double beta_threshold = 0.5;

  int vocab_size = 5000;
  int embed_dim = 16;
  int ext_hidden = 32;
  int abs_hidden = 32;
  double init_scale = 0.1;

  int max_len = 120;
  int beam_width = 1;

  std::uint64_t seed = 1;

  static TrainConfig desk();
  static TrainConfig paper();
  static TrainConfig preset_named(const std::string& name);

  void validate() const;
  nlohmann::json to_json() const;
  // Applies the keys of j on top of base.
  static TrainConfig from_json(const nlohmann::json& j, TrainConfig base);

  // Hash of the canonical JSON form.
  std::string fingerprint() const;

  double learning_rate() const;
  int batch_size() const;
  // Iterations of the main phase (pretrain-abs adds iters_coverage on top).
  int iterations() const;
  int total_iterations() const;

  TruncationLimits ext_limits() const;
  TruncationLimits abs_limits() const;
  TruncationLimits e2e_limits() const;
  ModelDims dims(int vocab) const;
};

}  // namespace unisum

#endif  // UNISUM_CONFIG_HPP_
