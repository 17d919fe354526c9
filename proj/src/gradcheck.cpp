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

#include "gradcheck.hpp"

#include <random>

#include "abstracter.hpp"
#include "common.hpp"
#include "extractor.hpp"
#include "fusion.hpp"

namespace unisum {

ToyProblem make_toy_problem(std::uint64_t seed, const ToyDims& dims) {
  if (dims.max_tokens < 4 || dims.max_steps < 2) throw ConfigError("toy problem needs at least 4 tokens and 2 steps");
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const Tokens words{"ant", "bee", "cat", "dog", "eel", "fox", "gnu", "hen", "ibis", "jay"};

  // Three sentences, the last word of the article is out of vocabulary.
  std::vector<Tokens> sentences(3);
  const int m = uniform(4, dims.max_tokens);
  for (int i = 0; i < m - 1; ++i) sentences[static_cast<std::size_t>(i % 3)].push_back(words[static_cast<std::size_t>(uniform(0, 9))]);
  sentences[2].push_back("zyzzyva");
  Article article = from_sentences(sentences);

  Tokens reference;
  const int t = uniform(1, dims.max_steps - 1);
  for (int i = 0; i < t - 1; ++i) reference.push_back(words[static_cast<std::size_t>(uniform(0, 9))]);
  reference.push_back("zyzzyva");

  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& w : words) counts[w] = 1;
  Vocab vocab = Vocab::build_from_counts(counts, words.size() + kNumReserved);
  const int v = vocab.size();
  ToyProblem p{Model({v, dims.embed, dims.hidden, dims.hidden, dims.init_scale}, vocab, seed + 1), {}, {}, {}};
  p.article = index_article(article, p.model.vocab());
  p.targets = index_reference(reference, p.article, p.model.vocab());
  p.targets.push_back(kStopId);
  for (std::size_t n = 0; n < article.num_sentences(); ++n) p.labels.push_back(uniform(0, 1));
  return p;
}

std::vector<LossCheck> check_all_losses(std::uint64_t seed, double epsilon, double tolerance, const ToyDims& dims) {
  ToyProblem p = make_toy_problem(seed, dims);
  const Model& model = p.model;
  const auto& sent_of = p.article.article.sentence_of;
  auto run = [&](Graph& g, bool fused, bool coverage) {
    Var beta = score_sentences(g, model, p.article);
    return std::pair{beta, teacher_forced(g, model, p.article, p.targets, fused ? beta : Var{}, coverage)};
  };
  const std::vector<std::pair<std::string, LossFn>> losses{
      {"L_ext", [&](Graph& g) { return extractor_loss(score_sentences(g, model, p.article), p.labels); }},
      {"L_abs", [&](Graph& g) { return run(g, true, true).second.nll; }},
      {"L_cov", [&](Graph& g) { return run(g, true, true).second.coverage; }},
      {"L_inc",
       [&](Graph& g) {
         auto [beta, tf] = run(g, true, true);
         return inconsistency_loss(tf.raw_attention, beta, sent_of, 3);
       }},
      {"L_e2e", [&](Graph& g) {
         auto [beta, tf] = run(g, true, true);
         return scale(extractor_loss(beta, p.labels), 5.0) + tf.nll + tf.coverage +
                inconsistency_loss(tf.raw_attention, beta, sent_of, 3);
       }}};

  std::vector<LossCheck> out;
  for (const auto& [name, fn] : losses) {
    ParamFilter filter;
    if (name == "L_ext") filter = Model::is_extractor_param;
    out.push_back({name, finite_diff_check(p.model.params(), fn, epsilon, tolerance, filter)});
  }
  return out;
}

}  // namespace unisum
