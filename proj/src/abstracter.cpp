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

#include "abstracter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"
#include "fusion.hpp"

namespace unisum {

EncoderOutput encode(Graph& g, const Model& model, const IndexedArticle& article) {
  const AbstracterParams& p = model.abs();
  const std::size_t M = article.base_ids.size();
  if (M == 0) throw DataError("cannot encode an empty article");
  const int H = p.enc_fwd.hidden;

  std::vector<Var> emb;
  emb.reserve(M);
  for (int id : article.base_ids) emb.push_back(g.lookup(p.embedding, id));

  std::vector<Var> fwd(M), bwd(M);
  LstmState f{zeros(g, H), zeros(g, H)};
  for (std::size_t m = 0; m < M; ++m) fwd[m] = (f = lstm_step(g, p.enc_fwd, emb[m], f)).h;
  LstmState b{zeros(g, H), zeros(g, H)};
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t m = M - 1 - i;
    bwd[m] = (b = lstm_step(g, p.enc_bwd, emb[m], b)).h;
  }

  std::vector<Var> rows;
  rows.reserve(M);
  for (std::size_t m = 0; m < M; ++m) rows.push_back(concat({fwd[m], bwd[m]}));

  EncoderOutput out;
  out.states = stack(rows);
  out.features = add(matmul(out.states, g.param(p.attn_wh)), g.param(p.attn_b));
  out.initial.h = add(matmul(concat({f.h, b.h}), g.param(p.reduce_h_w)), g.param(p.reduce_h_b));
  out.initial.c = add(matmul(concat({f.c, b.c}), g.param(p.reduce_c_w)), g.param(p.reduce_c_b));
  return out;
}

Var raw_attention(Graph& g, const Model& model, const EncoderOutput& enc, Var decoder_h, Var coverage) {
  const AbstracterParams& p = model.abs();
  Var scores = add(enc.features, matmul(decoder_h, g.param(p.attn_ws)));
  if (coverage.valid()) {
    const int M = enc.states.shape().rows();
    scores = scores + matmul(reshape(coverage, Shape::mat(M, 1)), g.param(p.attn_wc));
  }
  return softmax(matmul(tanh(scores), g.param(p.attn_v)));
}

StepOutput decode_step(Graph& g, const Model& model, const EncoderOutput& enc, const IndexedArticle& article,
                       Var decoder_h, Var input_embedding, Var attention, std::optional<double> forced_p_gen) {
  const AbstracterParams& p = model.abs();
  const auto& a = attention.value().data;
  const double mass = std::accumulate(a.begin(), a.end(), 0.0);
  if (std::abs(mass - 1.0) > 1e-6)
    throw NumericError("decoder attention is off the simplex (sum " + std::to_string(mass) + ")");
  if (a.size() != article.extended_ids.size()) throw ShapeError("attention length differs from article length");

  StepOutput out;
  out.context = matmul(attention, enc.states);
  Var hidden = add(matmul(concat({decoder_h, out.context}), g.param(p.out_w1)), g.param(p.out_b1));
  out.vocab_dist = softmax(add(matmul(hidden, g.param(p.out_w2)), g.param(p.out_b2)));
  out.p_gen = forced_p_gen ? g.constant(Tensor::vec({*forced_p_gen}))
                           : sigmoid(add(matmul(concat({out.context, decoder_h, input_embedding}), g.param(p.pgen_w)),
                                         g.param(p.pgen_b)));

  const int V = model.dims().vocab_size;
  const int extended = article.extended_size();
  Var generated = out.vocab_dist * out.p_gen;
  if (extended > V) generated = concat({generated, zeros(g, extended - V)});
  Var copied = scatter_add(attention, article.extended_ids, extended) * one_minus(out.p_gen);
  out.final_dist = generated + copied;
  return out;
}

Var nll_loss(std::span<const Var> finals, std::span<const int> targets) {
  if (finals.size() != targets.size() || finals.empty())
    throw ShapeError("nll: " + std::to_string(finals.size()) + " distributions for " + std::to_string(targets.size()) +
                     " targets");
  std::vector<Var> terms;
  terms.reserve(finals.size());
  for (std::size_t t = 0; t < finals.size(); ++t) {
    const int size = static_cast<int>(finals[t].value().size());
    if (targets[t] < 0 || targets[t] >= size)
      throw DataError("target id " + std::to_string(targets[t]) + " outside extended vocabulary of " +
                      std::to_string(size));
    terms.push_back(log(pick(finals[t], targets[t])));
  }
  return scale(mean(concat(terms)), -1.0);
}

double nll_loss(std::span<const std::vector<double>> finals, std::span<const int> targets) {
  if (finals.size() != targets.size() || finals.empty())
    throw ShapeError("nll: " + std::to_string(finals.size()) + " distributions for " + std::to_string(targets.size()) +
                     " targets");
  double total = 0.0;
  for (std::size_t t = 0; t < finals.size(); ++t) {
    if (targets[t] < 0 || static_cast<std::size_t>(targets[t]) >= finals[t].size())
      throw DataError("target id " + std::to_string(targets[t]) + " outside extended vocabulary of " +
                      std::to_string(finals[t].size()));
    total += std::log(std::max(finals[t][static_cast<std::size_t>(targets[t])], kLogClamp));
  }
  return -total / static_cast<double>(finals.size());
}

Var coverage_loss(std::span<const Var> attentions) {
  if (attentions.empty()) throw ShapeError("coverage loss needs at least one step");
  Graph& g = *attentions.front().graph;
  const int M = static_cast<int>(attentions.front().value().size());
  Var cov = zeros(g, M);
  std::vector<Var> terms;
  terms.reserve(attentions.size());
  for (const Var& a : attentions) {
    terms.push_back(sum(min(a, cov)));
    cov = cov + a;
  }
  return mean(concat(terms));
}

double coverage_loss(std::span<const std::vector<double>> attentions, std::vector<std::vector<double>>* coverage) {
  if (attentions.empty()) throw ShapeError("coverage loss needs at least one step");
  std::vector<double> cov(attentions.front().size(), 0.0);
  double total = 0.0;
  if (coverage) coverage->clear();
  for (const auto& a : attentions) {
    if (a.size() != cov.size()) throw ShapeError("coverage loss: ragged attention");
    if (coverage) coverage->push_back(cov);
    for (std::size_t m = 0; m < a.size(); ++m) {
      total += std::min(a[m], cov[m]);
      cov[m] += a[m];
    }
  }
  return total / static_cast<double>(attentions.size());
}

TeacherForced teacher_forced(Graph& g, const Model& model, const IndexedArticle& article,
                             std::span<const int> targets, Var beta, bool use_coverage) {
  const AbstracterParams& p = model.abs();
  const int V = model.dims().vocab_size;
  const int M = static_cast<int>(article.base_ids.size());
  EncoderOutput enc = encode(g, model, article);

  TeacherForced out;
  LstmState state = enc.initial;
  Var context = zeros(g, 2 * p.enc_fwd.hidden);
  Var coverage = zeros(g, M);
  std::vector<Var> cov_terms;
  int prev = kStartId;
  for (int target : targets) {
    Var emb = g.lookup(p.embedding, input_id(prev, V));
    state = lstm_step(g, p.dec, concat({emb, context}), state);
    Var alpha = raw_attention(g, model, enc, state.h, use_coverage ? coverage : Var{});
    Var fused = beta.valid() ? combine_or_raw(alpha, beta, article.article.sentence_of) : alpha;
    StepOutput step = decode_step(g, model, enc, article, state.h, emb, fused);
    cov_terms.push_back(sum(min(fused, coverage)));
    coverage = coverage + fused;
    context = step.context;
    out.raw_attention.push_back(alpha);
    out.fused_attention.push_back(fused);
    out.finals.push_back(step.final_dist);
    prev = target;
  }
  out.nll = nll_loss(out.finals, targets);
  out.coverage = mean(concat(cov_terms));
  return out;
}

namespace {

struct Hypothesis {
  std::vector<int> ids;
  double log_prob = 0.0;
  LstmState state;
  Var context;
  Var coverage;
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> fused;
};

struct Expansion {
  Hypothesis* parent;
  std::vector<double> alpha, fused;
  LstmState state;
  Var context, coverage;
};

Expansion expand(Graph& g, const Model& model, const EncoderOutput& enc, const IndexedArticle& article, Var beta,
                 const DecodeOptions& options, Hypothesis& h, std::vector<double>& dist) {
  const AbstracterParams& p = model.abs();
  const int prev = h.ids.empty() ? kStartId : h.ids.back();
  Var emb = g.lookup(p.embedding, input_id(prev, model.dims().vocab_size));
  LstmState state = lstm_step(g, p.dec, concat({emb, h.context}), h.state);
  Var alpha = raw_attention(g, model, enc, state.h, options.use_coverage ? h.coverage : Var{});
  Var fused = beta.valid() ? combine_or_raw(alpha, beta, article.article.sentence_of) : alpha;
  StepOutput step = decode_step(g, model, enc, article, state.h, emb, fused);
  dist = step.final_dist.value().data;
  return {&h, alpha.value().data, fused.value().data, state, step.context, h.coverage + fused};
}

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

DecodeResult decode(const Model& model, const IndexedArticle& article, std::span<const double> beta,
                    const DecodeOptions& options) {
  DecodeResult result;
  if (options.max_len <= 0) return result;
  if (options.beam_width < 1) throw ConfigError("beam width must be at least 1");

  Graph g(&model.params());
  EncoderOutput enc = encode(g, model, article);
  Var beta_var;
  if (!beta.empty()) beta_var = g.constant(Tensor::vec(std::vector<double>(beta.begin(), beta.end())));
  const int M = static_cast<int>(article.base_ids.size());

  Hypothesis root;
  root.state = enc.initial;
  root.context = zeros(g, 2 * model.abs().enc_fwd.hidden);
  root.coverage = zeros(g, M);

  std::vector<double> dist;
  if (options.beam_width == 1) {
    Hypothesis h = root;
    for (int t = 0; t < options.max_len; ++t) {
      Expansion e = expand(g, model, enc, article, beta_var, options, h, dist);
      const int best = argmax(dist);
      h.raw.push_back(std::move(e.alpha));
      h.fused.push_back(std::move(e.fused));
      h.state = e.state;
      h.context = e.context;
      h.coverage = e.coverage;
      if (best == kStopId) break;
      h.ids.push_back(best);
    }
    result.ids = h.ids;
    result.raw_attention = std::move(h.raw);
    result.fused_attention = std::move(h.fused);
  } else {
    const int B = options.beam_width;
    std::vector<Hypothesis> alive{root};
    std::vector<Hypothesis> finished;
    for (int t = 0; t < options.max_len && !alive.empty(); ++t) {
      struct Candidate {
        std::size_t expansion;
        int id;
        double log_prob;
      };
      std::vector<Expansion> expansions;
      std::vector<Candidate> candidates;
      for (auto& h : alive) {
        expansions.push_back(expand(g, model, enc, article, beta_var, options, h, dist));
        std::vector<int> order(dist.size());
        std::iota(order.begin(), order.end(), 0);
        const auto keep = std::min<std::size_t>(static_cast<std::size_t>(2 * B), order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                          [&](int x, int y) { return dist[static_cast<std::size_t>(x)] != dist[static_cast<std::size_t>(y)]
                                                         ? dist[static_cast<std::size_t>(x)] > dist[static_cast<std::size_t>(y)]
                                                         : x < y; });
        for (std::size_t i = 0; i < keep; ++i)
          candidates.push_back({expansions.size() - 1, order[i],
                                h.log_prob + std::log(std::max(dist[static_cast<std::size_t>(order[i])], kLogClamp))});
      }
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const Candidate& x, const Candidate& y) { return x.log_prob > y.log_prob; });
      std::vector<Hypothesis> next;
      for (const Candidate& c : candidates) {
        const Expansion& e = expansions[c.expansion];
        Hypothesis h;
        h.ids = e.parent->ids;
        h.log_prob = c.log_prob;
        h.state = e.state;
        h.context = e.context;
        h.coverage = e.coverage;
        h.raw = e.parent->raw;
        h.fused = e.parent->fused;
        h.raw.push_back(e.alpha);
        h.fused.push_back(e.fused);
        if (c.id == kStopId) {
          finished.push_back(std::move(h));
        } else {
          h.ids.push_back(c.id);
          next.push_back(std::move(h));
        }
        if (static_cast<int>(next.size()) == B || static_cast<int>(finished.size()) == B) break;
      }
      alive = std::move(next);
      if (static_cast<int>(finished.size()) >= B) break;
    }
    std::vector<Hypothesis>& pool = finished.empty() ? alive : finished;
    auto score = [](const Hypothesis& h) { return h.log_prob / static_cast<double>(h.raw.size()); };
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i)
      if (score(pool[i]) > score(pool[best])) best = i;
    result.ids = pool[best].ids;
    result.raw_attention = pool[best].raw;
    result.fused_attention = pool[best].fused;
  }
  result.tokens = deindex(result.ids, article, model.vocab());
  return result;
}

}  // namespace unisum
