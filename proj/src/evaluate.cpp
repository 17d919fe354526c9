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

#include "evaluate.hpp"

#include "abstracter.hpp"
#include "common.hpp"
#include "extractor.hpp"
#include "fusion.hpp"
#include "oracle.hpp"
#include "rouge.hpp"
#include "trainer.hpp"

namespace unisum {

namespace {

constexpr const char* kModeNames[] = {"unified", "two-stage", "abstracter"};

bool decode_with_coverage(const Checkpoint& ckpt) {
  const TrainConfig& c = ckpt.config;
  if (!c.coverage) return false;
  if (ckpt.info.value("coverage_trained", false)) return true;
  return c.regime == Regime::kEnd2End && c.lambda_cov > 0.0;
}

Tokens concat_sentences(const Article& article, std::span<const int> indices) {
  Tokens out;
  for (int n : indices) {
    const Span& s = article.spans[static_cast<std::size_t>(n)];
    out.insert(out.end(), article.tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
               article.tokens.begin() + static_cast<std::ptrdiff_t>(s.end));
  }
  return out;
}

struct Triple {
  double r1 = 0, r2 = 0, rl = 0;
  void add(double a, double b, double c) {
    r1 += a;
    r2 += b;
    rl += c;
  }
  nlohmann::json json(const char* kind, double n) const {
    const std::string k = kind;
    return {{"rouge1_" + k, r1 / n}, {"rouge2_" + k, r2 / n}, {"rougeL_" + k, rl / n}};
  }
};

void add_recall(Triple& t, const Tokens& cand, const Tokens& ref) {
  t.add(rouge_n(cand, ref, 1).recall, rouge_n(cand, ref, 2).recall, rouge_l(cand, ref).recall);
}

}  // namespace

const char* mode_name(DecodeMode m) { return kModeNames[static_cast<int>(m)]; }

DecodeMode parse_mode(const std::string& name) {
  for (int i = 0; i < 3; ++i)
    if (name == kModeNames[i]) return static_cast<DecodeMode>(i);
  throw ConfigError("unknown decode mode '" + name + "' (expected unified, two-stage or abstracter)");
}

Summary summarize(const Checkpoint& ckpt, const Article& article, DecodeMode mode) {
  const TrainConfig& c = ckpt.config;
  const Vocab& vocab = ckpt.model.vocab();
  Summary out;
  const Article full = truncate(article, c.ext_limits());
  if (full.num_sentences() == 0) throw DataError("cannot summarize an empty article");
  out.beta = score_sentences(ckpt.model, index_article(full, vocab));

  Article input;
  if (mode == DecodeMode::kTwoStage) {
    const std::vector<int> chosen = sentences_above(out.beta, c.beta_threshold);
    input = truncate(select_sentences(full, chosen), c.abs_limits());
    out.source_sentences.assign(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(input.num_sentences()));
  } else {
    input = full;
    for (std::size_t n = 0; n < full.num_sentences(); ++n) out.source_sentences.push_back(static_cast<int>(n));
  }
  for (int local : input.sentence_of) out.sentence_of.push_back(out.source_sentences[static_cast<std::size_t>(local)]);

  const IndexedArticle indexed = index_article(input, vocab);
  DecodeOptions options{c.max_len, c.beam_width, decode_with_coverage(ckpt)};
  std::span<const double> fusion_beta;
  if (mode == DecodeMode::kUnified) fusion_beta = out.beta;
  DecodeResult result = decode(ckpt.model, indexed, fusion_beta, options);
  out.tokens = std::move(result.tokens);
  out.raw_attention = std::move(result.raw_attention);
  return out;
}

std::vector<Summary> summarize_corpus(const Checkpoint& ckpt, std::span<const SummaryPair> corpus, DecodeMode mode) {
  std::vector<Summary> out;
  out.reserve(corpus.size());
  for (const auto& pair : corpus) out.push_back(summarize(ckpt, pair.article, mode));
  return out;
}

nlohmann::json evaluate(const Checkpoint& ckpt, std::span<const SummaryPair> corpus, DecodeMode mode) {
  const TrainConfig& c = ckpt.config;
  Triple extractive, oracle, abstractive;
  double accuracy = 0.0;
  double rate_sum = 0.0;
  nlohmann::json per_article = nlohmann::json::array();
  const bool with_rate = mode != DecodeMode::kTwoStage;

  for (const SummaryPair& pair : corpus) {
    const Article full = truncate(pair.article, c.ext_limits());
    Summary s = summarize(ckpt, pair.article, mode);

    std::vector<int> extracted;
    for (std::size_t n = 0; n < s.beta.size(); ++n)
      if (s.beta[n] > c.beta_threshold) extracted.push_back(static_cast<int>(n));
    add_recall(extractive, concat_sentences(full, extracted), pair.reference);

    const LabelVector labels = extract_labels(full, pair.reference);
    add_recall(oracle, concat_sentences(full, selected_indices(labels)), pair.reference);
    int agree = 0;
    for (std::size_t n = 0; n < labels.size(); ++n) agree += (s.beta[n] > c.beta_threshold) == (labels[n] == 1);
    accuracy += static_cast<double>(agree) / static_cast<double>(labels.size());

    abstractive.add(rouge_n(s.tokens, pair.reference, 1).f1, rouge_n(s.tokens, pair.reference, 2).f1,
                    rouge_l(s.tokens, pair.reference).f1);
    if (with_rate) {
      const double r = inconsistency_rate(s.raw_attention, s.beta, s.sentence_of).rate;
      rate_sum += r;
      per_article.push_back(r);
    }
  }

  const double n = corpus.empty() ? 1.0 : static_cast<double>(corpus.size());
  nlohmann::json report;
  report["fingerprint"] = c.fingerprint();
  report["regime"] = regime_name(c.regime);
  report["mode"] = mode_name(mode);
  report["records"] = corpus.size();
  report["decode"] = {{"max_len", c.max_len}, {"beam_width", c.beam_width}, {"coverage", decode_with_coverage(ckpt)}};
  report["extractive"] = extractive.json("recall", n);
  report["extractive"]["label_accuracy"] = accuracy / n;
  report["oracle"] = oracle.json("recall", n);
  report["abstractive"] = abstractive.json("f1", n);
  if (with_rate)
    report["inconsistency"] = {{"mean_rate", rate_sum / n}, {"per_article", per_article}};
  else
    report["inconsistency"] = nullptr;
  return report;
}

}  // namespace unisum
