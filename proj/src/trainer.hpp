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

#ifndef UNISUM_TRAINER_HPP_
#define UNISUM_TRAINER_HPP_

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "checkpoint.hpp"
#include "corpus.hpp"
#include "oracle.hpp"

namespace unisum {

// One training/validation record, already truncated and indexed for the
// regime of the checkpoint it was prepared for.
struct Example {
  IndexedArticle article;  // model input
  LabelVector labels;      // extractor targets over article sentences (ext, e2e)
  std::vector<int> targets;  // reference extended ids + STOP (abs, two-stage, e2e)
  std::vector<int> source_sentences;  // sentences of the original article fed to the model
};

// Per-batch mean loss components. total is the weighted sum actually
// minimized; unused components stay 0.
struct LossParts {
  double total = 0.0;
  double ext = 0.0;
  double abs = 0.0;
  double cov = 0.0;
  double inc = 0.0;
};

// Oracle labels for an (already truncated) article. Supplied labels computed
// on the untruncated article are cut to its sentence count.
LabelVector labels_for(const Article& article, const Tokens& reference, const LabelVector* supplied);

// Sentences whose beta exceeds the threshold; the single best one when none do.
std::vector<int> sentences_above(std::span<const double> beta, double threshold);

// Builds the regime-specific examples. `labels` is either empty or aligned
// with `corpus`. Pretrain-abs skips records without any labeled sentence.
std::vector<Example> prepare_examples(const Checkpoint& ckpt, std::span<const SummaryPair> corpus,
                                      std::span<const LabelVector> labels = {});

// Splits off the last valid_fraction of the corpus (at least one record when
// the fraction is positive and the corpus has two or more).
std::pair<std::vector<SummaryPair>, std::vector<SummaryPair>> split_corpus(std::span<const SummaryPair> corpus,
                                                                           double valid_fraction);

// Fresh run state for config.regime. Without `init` a vocabulary is built
// from `corpus` and all parameters are drawn from config.seed. With `init`
// the vocabulary and parameters are copied from it; `abs_init` optionally
// overrides the abstracter half (its vocabulary must match).
Checkpoint start_run(const TrainConfig& config, std::span<const SummaryPair> corpus, const Checkpoint* init = nullptr,
                     const Checkpoint* abs_init = nullptr);

// Loss of one example under the regime and phase of the checkpoint.
LossParts example_loss(const Checkpoint& ckpt, const Example& ex, bool coverage_phase, GradSet* grads, double seed);

struct EvalPoint {
  std::int64_t iteration = 0;
  double valid_loss = 0.0;
  LossParts parts;
};

struct TrainSummary {
  std::vector<EvalPoint> evals;
  std::vector<LossParts> steps;  // one per optimizer step of this session
  double best_valid = 0.0;
  std::int64_t best_iteration = 0;
  bool stopped_early = false;
  std::optional<double> coverage_before;  // held-out L_cov before / after the coverage phase
  std::optional<double> coverage_after;
};

struct TrainHooks {
  std::function<void(std::int64_t iteration, const LossParts&)> on_step;
  std::function<void(const EvalPoint&)> on_eval;
};

class Trainer {
 public:
  Trainer(Checkpoint& ckpt, std::span<const Example> train, std::span<const Example> valid);

  // One optimizer step on a batch drawn from the checkpoint's RNG.
  LossParts step();
  // Mean validation loss under the current phase.
  LossParts validate() const;
  double validation_coverage() const;
  bool coverage_phase() const;
  bool finished() const;

  // Runs to the iteration budget (or early stop) and leaves the best
  // validated parameters in the checkpoint.
  TrainSummary run(const TrainHooks& hooks = {});

 private:
  ParamMask mask() const;

  Checkpoint& ckpt_;
  std::span<const Example> train_;
  std::span<const Example> valid_;
  std::mt19937_64 rng_;
};

}  // namespace unisum

#endif  // UNISUM_TRAINER_HPP_
