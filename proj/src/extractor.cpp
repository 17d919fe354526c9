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

#include "extractor.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace unisum {

namespace {

Var run_direction(Graph& g, const GruParams& cell, std::span<const Var> inputs, bool reverse) {
  Var h = zeros(g, cell.hidden);
  const std::size_t n = inputs.size();
  for (std::size_t i = 0; i < n; ++i) h = gru_step(g, cell, inputs[reverse ? n - 1 - i : i], h);
  return h;
}

std::vector<Var> run_sequence(Graph& g, const GruParams& cell, std::span<const Var> inputs, bool reverse) {
  std::vector<Var> out(inputs.size());
  Var h = zeros(g, cell.hidden);
  const std::size_t n = inputs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = reverse ? n - 1 - i : i;
    h = gru_step(g, cell, inputs[k], h);
    out[k] = h;
  }
  return out;
}

}  // namespace

Var score_sentences(Graph& g, const Model& model, const IndexedArticle& article) {
  const ExtractorParams& p = model.ext();
  const Article& a = article.article;
  if (a.num_sentences() == 0) throw DataError("cannot score an article without sentences");

  std::vector<Var> reps;
  reps.reserve(a.num_sentences());
  for (const Span& s : a.spans) {
    if (s.size() == 0) throw DataError("internal: empty sentence span");
    std::vector<Var> words;
    words.reserve(s.size());
    for (std::size_t m = s.begin; m < s.end; ++m) words.push_back(g.lookup(p.embedding, article.base_ids[m]));
    reps.push_back(concat({run_direction(g, p.word_fwd, words, false), run_direction(g, p.word_bwd, words, true)}));
  }
  std::vector<Var> fwd = run_sequence(g, p.sent_fwd, reps, false);
  std::vector<Var> bwd = run_sequence(g, p.sent_bwd, reps, true);
  std::vector<Var> outs;
  outs.reserve(reps.size());
  for (std::size_t n = 0; n < reps.size(); ++n) outs.push_back(concat({fwd[n], bwd[n]}));
  Var logits = add(matmul(stack(outs), g.param(p.cls_w)), g.param(p.cls_b));
  return sigmoid(logits);
}

std::vector<double> score_sentences(const Model& model, const IndexedArticle& article) {
  Graph g(&model.params());
  return score_sentences(g, model, article).value().data;
}

std::vector<std::vector<double>> score_batch(const Model& model, std::span<const IndexedArticle> articles) {
  std::vector<std::vector<double>> out;
  out.reserve(articles.size());
  for (const auto& a : articles) out.push_back(score_sentences(model, a));
  return out;
}

Var extractor_loss(Var beta, const LabelVector& labels) {
  const std::size_t n = beta.value().size();
  if (n != labels.size())
    throw ShapeError("extractor loss: " + std::to_string(n) + " probabilities for " + std::to_string(labels.size()) +
                     " labels");
  Tensor pos(Shape::vec(static_cast<int>(n))), neg(Shape::vec(static_cast<int>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    pos.data[i] = labels[i] ? 1.0 : 0.0;
    neg.data[i] = labels[i] ? 0.0 : 1.0;
  }
  Graph& g = *beta.graph;
  Var ll = g.constant(std::move(pos)) * log(beta) + g.constant(std::move(neg)) * log(one_minus(beta));
  return scale(mean(ll), -1.0);
}

double extractor_loss(std::span<const double> beta, const LabelVector& labels) {
  if (beta.size() != labels.size())
    throw ShapeError("extractor loss: " + std::to_string(beta.size()) + " probabilities for " +
                     std::to_string(labels.size()) + " labels");
  double total = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i)
    total += labels[i] ? std::log(std::max(beta[i], kLogClamp)) : std::log(std::max(1.0 - beta[i], kLogClamp));
  return -total / static_cast<double>(beta.size());
}

}  // namespace unisum
