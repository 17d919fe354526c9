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

#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "abstracter.hpp"
#include "common.hpp"
#include "extractor.hpp"
#include "fusion.hpp"

namespace unisum {

namespace {

std::string rng_text(const std::mt19937_64& rng) {
  std::ostringstream s;
  s << rng;
  return s.str();
}

Tokens cut_reference(const Tokens& reference, int max_len) {
  return Tokens(reference.begin(), reference.begin() + std::min<std::ptrdiff_t>(max_len, static_cast<std::ptrdiff_t>(reference.size())));
}

void add_parts(LossParts& into, const LossParts& p, double w) {
  into.total += w * p.total;
  into.ext += w * p.ext;
  into.abs += w * p.abs;
  into.cov += w * p.cov;
  into.inc += w * p.inc;
}

bool coverage_trained(const Checkpoint& ckpt) { return ckpt.info.value("coverage_trained", false); }

}  // namespace

LabelVector labels_for(const Article& article, const Tokens& reference, const LabelVector* supplied) {
  if (!supplied) return extract_labels(article, reference);
  if (supplied->size() < article.num_sentences())
    throw DataError("label vector has " + std::to_string(supplied->size()) + " entries for an article of " +
                    std::to_string(article.num_sentences()) + " sentences");
  return LabelVector(supplied->begin(), supplied->begin() + static_cast<std::ptrdiff_t>(article.num_sentences()));
}

std::vector<int> sentences_above(std::span<const double> beta, double threshold) {
  std::vector<int> out;
  for (std::size_t n = 0; n < beta.size(); ++n)
    if (beta[n] > threshold) out.push_back(static_cast<int>(n));
  if (out.empty() && !beta.empty())
    out.push_back(static_cast<int>(std::max_element(beta.begin(), beta.end()) - beta.begin()));
  return out;
}

std::vector<Example> prepare_examples(const Checkpoint& ckpt, std::span<const SummaryPair> corpus,
                                      std::span<const LabelVector> labels) {
  if (!labels.empty() && labels.size() != corpus.size())
    throw DataError("got " + std::to_string(labels.size()) + " label vectors for " + std::to_string(corpus.size()) +
                    " records");
  const TrainConfig& c = ckpt.config;
  const Vocab& vocab = ckpt.model.vocab();
  std::vector<Example> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const SummaryPair& pair = corpus[i];
    const Article full = truncate(pair.article, c.ext_limits());
    if (full.num_sentences() == 0) throw DataError("record " + std::to_string(i + 1) + " has an empty article");
    const LabelVector* supplied = labels.empty() ? nullptr : &labels[i];
    Example ex;
    Article input;
    switch (c.regime) {
      case Regime::kPretrainExt:
      case Regime::kEnd2End:
        ex.labels = labels_for(full, pair.reference, supplied);
        input = full;
        for (std::size_t n = 0; n < full.num_sentences(); ++n) ex.source_sentences.push_back(static_cast<int>(n));
        break;
      case Regime::kPretrainAbs:
        ex.source_sentences = selected_indices(labels_for(full, pair.reference, supplied));
        if (ex.source_sentences.empty()) {
          warn("record " + std::to_string(i + 1) + " has no labeled sentence; skipped");
          continue;
        }
        break;
      case Regime::kTwoStage: {
        const std::vector<double> beta = score_sentences(ckpt.model, index_article(full, vocab));
        ex.source_sentences = sentences_above(beta, c.beta_threshold);
        break;
      }
    }
    if (c.regime == Regime::kPretrainAbs || c.regime == Regime::kTwoStage) {
      input = truncate(select_sentences(full, ex.source_sentences), c.abs_limits());
      ex.source_sentences.resize(input.num_sentences());
      // The abstracter must only ever see the chosen sentences.
      for (std::size_t k = 0; k < input.num_sentences(); ++k) {
        const Tokens got = input.sentence(k);
        const Tokens want = full.sentence(static_cast<std::size_t>(ex.source_sentences[k]));
        if (got.size() > want.size() || !std::equal(got.begin(), got.end(), want.begin()))
          throw Error("internal: abstracter input deviates from the selected sentences");
      }
    }
    ex.article = index_article(input, vocab);
    if (c.regime != Regime::kPretrainExt) {
      ex.targets = index_reference(cut_reference(pair.reference, c.max_summary), ex.article, vocab);
      ex.targets.push_back(kStopId);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::pair<std::vector<SummaryPair>, std::vector<SummaryPair>> split_corpus(std::span<const SummaryPair> corpus,
                                                                           double valid_fraction) {
  std::size_t n_valid = static_cast<std::size_t>(std::floor(valid_fraction * static_cast<double>(corpus.size())));
  if (valid_fraction > 0.0 && n_valid == 0 && corpus.size() >= 2) n_valid = 1;
  const std::size_t n_train = corpus.size() - n_valid;
  return {std::vector<SummaryPair>(corpus.begin(), corpus.begin() + static_cast<std::ptrdiff_t>(n_train)),
          std::vector<SummaryPair>(corpus.begin() + static_cast<std::ptrdiff_t>(n_train), corpus.end())};
}

Checkpoint start_run(const TrainConfig& config, std::span<const SummaryPair> corpus, const Checkpoint* init,
                     const Checkpoint* abs_init) {
  config.validate();
  auto make = [&]() -> Checkpoint {
    if (!init) {
      if (corpus.empty()) throw ConfigError("cannot train on an empty corpus");
      Vocab vocab = Vocab::build(corpus, static_cast<std::size_t>(config.vocab_size));
      const int v = vocab.size();
      return Checkpoint(Model(config.dims(v), std::move(vocab), config.seed), config);
    }
    const ModelDims& d = init->model.dims();
    if (d.embed_dim != config.embed_dim || d.ext_hidden != config.ext_hidden || d.abs_hidden != config.abs_hidden)
      throw ConfigError("initial checkpoint dimensions differ from the configured model dimensions");
    Checkpoint ck(init->model, config);
    ck.info["coverage_trained"] = coverage_trained(*init);
    return ck;
  };
  Checkpoint ck = make();
  if (abs_init) {
    if (!(abs_init->model.vocab() == ck.model.vocab()))
      throw DataError("extractor and abstracter checkpoints were built with different vocabularies");
    if (!(abs_init->model.dims() == ck.model.dims()))
      throw DataError("extractor and abstracter checkpoints have different dimensions");
    ParamSet& dst = ck.model.params();
    const ParamSet& src = abs_init->model.params();
    for (int i = 0; i < dst.size(); ++i)
      if (Model::is_abstracter_param(dst.name(i))) dst[i] = src[src.id(dst.name(i))];
    ck.info["coverage_trained"] = coverage_trained(*abs_init);
  }
  ck.info["regime"] = regime_name(config.regime);
  ck.info["history"] = nlohmann::json::array();
  ck.iteration = 0;
  ck.rng_state = rng_text(std::mt19937_64(config.seed * 4 + static_cast<std::uint64_t>(config.regime)));
  return ck;
}

LossParts example_loss(const Checkpoint& ckpt, const Example& ex, bool coverage_phase, GradSet* grads, double seed) {
  const Model& model = ckpt.model;
  const TrainConfig& c = ckpt.config;
  Graph g(&model.params());
  LossParts p;
  Var total;
  switch (c.regime) {
    case Regime::kPretrainExt: {
      total = extractor_loss(score_sentences(g, model, ex.article), ex.labels);
      p.ext = total.item();
      break;
    }
    case Regime::kPretrainAbs:
    case Regime::kTwoStage: {
      TeacherForced tf = teacher_forced(g, model, ex.article, ex.targets, Var{}, coverage_phase);
      p.abs = tf.nll.item();
      p.cov = tf.coverage.item();
      total = coverage_phase ? tf.nll + tf.coverage : tf.nll;
      break;
    }
    case Regime::kEnd2End: {
      Var beta = score_sentences(g, model, ex.article);
      TeacherForced tf = teacher_forced(g, model, ex.article, ex.targets, beta, coverage_phase);
      Var ext = extractor_loss(beta, ex.labels);
      p.ext = ext.item();
      p.abs = tf.nll.item();
      p.cov = tf.coverage.item();
      total = scale(ext, c.lambda_ext) + scale(tf.nll, c.lambda_abs);
      if (coverage_phase) total = total + scale(tf.coverage, c.lambda_cov);
      const auto& sent_of = ex.article.article.sentence_of;
      if (c.lambda_inc > 0.0) {
        Var inc = inconsistency_loss(tf.raw_attention, beta, sent_of, c.top_k);
        p.inc = inc.item();
        total = total + scale(inc, c.lambda_inc);
      } else {
        std::vector<std::vector<double>> alphas;
        for (const Var& a : tf.raw_attention) alphas.push_back(a.value().data);
        p.inc = inconsistency_loss(alphas, beta.value().data, sent_of, c.top_k);
      }
      break;
    }
  }
  p.total = total.item();
  if (grads) g.backward(total, *grads, seed);
  return p;
}

Trainer::Trainer(Checkpoint& ckpt, std::span<const Example> train, std::span<const Example> valid)
    : ckpt_(ckpt), train_(train), valid_(valid) {
  if (train_.empty()) throw ConfigError("cannot train on an empty corpus");
  const int cap = ckpt_.config.eval_records;
  if (cap > 0 && valid_.size() > static_cast<std::size_t>(cap)) valid_ = valid_.first(static_cast<std::size_t>(cap));
  std::istringstream s(ckpt_.rng_state);
  s >> rng_;
  if (!s) throw DataError("checkpoint carries an unreadable RNG state");
}

bool Trainer::coverage_phase() const {
  const TrainConfig& c = ckpt_.config;
  if (!c.coverage) return false;
  switch (c.regime) {
    case Regime::kPretrainAbs: return ckpt_.iteration >= c.iters_abs;
    case Regime::kTwoStage: return coverage_trained(ckpt_);
    case Regime::kEnd2End: return c.lambda_cov > 0.0;
    default: return false;
  }
}

bool Trainer::finished() const { return ckpt_.iteration >= ckpt_.config.total_iterations(); }

ParamMask Trainer::mask() const {
  switch (ckpt_.config.regime) {
    case Regime::kPretrainExt: return Model::is_extractor_param;
    case Regime::kEnd2End: return {};
    default: return Model::is_abstracter_param;
  }
}

LossParts Trainer::step() {
  const int batch = ckpt_.config.batch_size();
  const bool cov = coverage_phase();
  GradSet grads = zeros_like(ckpt_.model.params());
  LossParts parts;
  std::uniform_int_distribution<std::size_t> pick(0, train_.size() - 1);
  for (int b = 0; b < batch; ++b) {
    const Example& ex = train_[pick(rng_)];
    add_parts(parts, example_loss(ckpt_, ex, cov, &grads, 1.0 / batch), 1.0 / batch);
  }
  adagrad_step(ckpt_.model.params(), grads, ckpt_.optimizer, mask());
  ++ckpt_.iteration;
  ckpt_.rng_state = rng_text(rng_);
  return parts;
}

LossParts Trainer::validate() const {
  LossParts parts;
  if (valid_.empty()) return parts;
  const bool cov = coverage_phase();
  for (const Example& ex : valid_) add_parts(parts, example_loss(ckpt_, ex, cov, nullptr, 1.0), 1.0 / static_cast<double>(valid_.size()));
  return parts;
}

double Trainer::validation_coverage() const {
  double total = 0.0;
  for (const Example& ex : valid_) {
    Graph g(&ckpt_.model.params());
    total += teacher_forced(g, ckpt_.model, ex.article, ex.targets, Var{}, true).coverage.item();
  }
  return valid_.empty() ? 0.0 : total / static_cast<double>(valid_.size());
}

TrainSummary Trainer::run(const TrainHooks& hooks) {
  const TrainConfig& c = ckpt_.config;
  TrainSummary summary;
  ParamSet& params = ckpt_.model.params();
  std::vector<Tensor> best;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  bool stop = false;

  auto restore_best = [&] {
    if (best.empty()) return;
    for (int i = 0; i < params.size(); ++i) params[i] = best[static_cast<std::size_t>(i)];
  };
  auto evaluate = [&] {
    if (valid_.empty()) return;
    EvalPoint pt{ckpt_.iteration, 0.0, validate()};
    pt.valid_loss = pt.parts.total;
    summary.evals.push_back(pt);
    ckpt_.info["history"].push_back({{"iteration", pt.iteration}, {"valid_loss", pt.valid_loss}});
    if (hooks.on_eval) hooks.on_eval(pt);
    if (pt.valid_loss < best_loss) {
      best_loss = pt.valid_loss;
      summary.best_iteration = ckpt_.iteration;
      best.clear();
      for (int i = 0; i < params.size(); ++i) best.push_back(params[i]);
      stale = 0;
    } else if (c.patience > 0 && ++stale >= c.patience) {
      stop = true;
    }
  };
  auto enter_coverage = [&] {
    restore_best();
    summary.coverage_before = validation_coverage();
    ckpt_.info["coverage_trained"] = true;
    ckpt_.info["coverage_loss_before"] = *summary.coverage_before;
    best.clear();
    best_loss = std::numeric_limits<double>::infinity();
    stale = 0;
    stop = false;
  };
  const bool has_coverage_phase = c.regime == Regime::kPretrainAbs && c.coverage && c.iters_coverage > 0;

  if (has_coverage_phase && ckpt_.iteration >= c.iters_abs && !coverage_trained(ckpt_)) enter_coverage();
  evaluate();
  while (!finished()) {
    const LossParts parts = step();
    summary.steps.push_back(parts);
    if (hooks.on_step) hooks.on_step(ckpt_.iteration, parts);
    const bool boundary = has_coverage_phase && ckpt_.iteration == c.iters_abs;
    if (ckpt_.iteration % c.eval_interval == 0 || finished() || boundary) evaluate();
    if (stop) {
      summary.stopped_early = true;
      if (has_coverage_phase && ckpt_.iteration < c.iters_abs) {
        ckpt_.iteration = c.iters_abs;
      } else {
        break;
      }
    }
    if (has_coverage_phase && ckpt_.iteration >= c.iters_abs && !coverage_trained(ckpt_) && !finished()) {
      enter_coverage();
      evaluate();
    }
  }
  restore_best();
  summary.best_valid = best_loss;
  if (has_coverage_phase && coverage_trained(ckpt_)) {
    summary.coverage_after = validation_coverage();
    ckpt_.info["coverage_loss_after"] = *summary.coverage_after;
  }
  if (!valid_.empty()) {
    ckpt_.info["best_valid"] = best_loss;
    ckpt_.info["best_iteration"] = summary.best_iteration;
  }
  return summary;
}

}  // namespace unisum
