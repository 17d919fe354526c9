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
#include <numeric>
#include <random>

#include "common.hpp"
#include "abstracter.hpp"
#include "corpus.hpp"
#include "doctest.h"
#include "extractor.hpp"
#include "model.hpp"

using namespace unisum;

namespace {

Vocab small_vocab() {
  std::vector<SummaryPair> corpus{{segment(tokenize("a b c d e f g h . i j k .")), {}}};
  return Vocab::build(corpus, 100);
}

Model small_model(std::uint64_t seed = 4) {
  Vocab v = small_vocab();
  ModelDims d{v.size(), 6, 5, 5, 0.3};
  return Model(d, v, seed);
}

void zero_all(Model& m) {
  for (int i = 0; i < m.params().size(); ++i)
    for (double& v : m.params()[i].data) v = 0.0;
}

std::vector<double> row(const Tensor& t, int r) {
  const int cols = t.shape.dims[1];
  return {t.data.begin() + r * cols, t.data.begin() + (r + 1) * cols};
}

}  // namespace

TEST_CASE("zeroed classifier gives beta 0.5") {
  Model m = small_model();
  for (int id : {m.ext().cls_w, m.ext().cls_b})
    for (double& v : m.params()[id].data) v = 0.0;
  auto beta = score_sentences(m, index_article(segment(tokenize("a b . c d e . f .")), m.vocab()));
  CHECK(beta == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("batched scoring is per-article") {
  Model m = small_model();
  std::vector<IndexedArticle> batch{index_article(segment(tokenize("a b . c .")), m.vocab()),
                                    index_article(segment(tokenize("d e f . g . h i .")), m.vocab())};
  auto fwd = score_batch(m, batch);
  std::swap(batch[0], batch[1]);
  auto rev = score_batch(m, batch);
  CHECK(fwd[0] == rev[1]);
  CHECK(fwd[1] == rev[0]);
}

TEST_CASE("extractor loss values") {
  CHECK(extractor_loss(std::vector<double>{0.5, 0.5, 0.5}, LabelVector{1, 0, 1}) == doctest::Approx(std::log(2.0)));
  CHECK(extractor_loss(std::vector<double>{1.0, 0.0}, LabelVector{1, 0}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(extractor_loss(std::vector<double>{0.9, 0.1}, LabelVector{1, 0}) ==
        doctest::Approx(-(std::log(0.9) + std::log(0.9)) / 2));
}

TEST_CASE("encoder shape, reversal symmetry and zero parameters") {
  Model m = small_model();
  Tokens t = tokenize("a b c d e .");
  Tokens r(t.rbegin(), t.rend());
  Graph g(&m.params());
  auto fwd = encode(g, m, index_article(segment(t), m.vocab()));
  auto rev = encode(g, m, index_article(segment(r), m.vocab()));
  const Tensor& a = fwd.states.value();
  const Tensor& b = rev.states.value();
  const int M = static_cast<int>(t.size());
  const int H = m.dims().abs_hidden;
  REQUIRE(a.shape.dims[0] == M);
  REQUIRE(a.shape.dims[1] == 2 * H);
  // with mirrored directions the two encodings are reversed, halves swapped
  Model mirrored = m;
  const auto& p = m.abs();
  for (auto [x, y] : {std::pair{p.enc_fwd.w, p.enc_bwd.w}, std::pair{p.enc_fwd.b, p.enc_bwd.b}}) {
    mirrored.params()[x] = m.params()[y];
    mirrored.params()[y] = m.params()[x];
  }
  Graph g2(&mirrored.params());
  const Tensor c = encode(g2, mirrored, index_article(segment(r), mirrored.vocab())).states.value();
  for (int i = 0; i < M; ++i) {
    auto orig = row(a, i), other = row(c, M - 1 - i);
    for (int k = 0; k < H; ++k) {
      CHECK(std::abs(orig[static_cast<std::size_t>(k)] - other[static_cast<std::size_t>(k + H)]) < 1e-10);
      CHECK(std::abs(orig[static_cast<std::size_t>(k + H)] - other[static_cast<std::size_t>(k)]) < 1e-10);
    }
  }
  (void)b;

  zero_all(m);
  Graph g3(&m.params());
  auto zero = encode(g3, m, index_article(segment(t), m.vocab()));
  for (double v : zero.states.value().data) CHECK(v == 0.0);
}

TEST_CASE("attention is uniform for equal logits and ignores empty coverage") {
  Model m = small_model();
  zero_all(m);
  Graph g(&m.params());
  auto art = index_article(segment(tokenize("a b c d .")), m.vocab());
  auto enc = encode(g, m, art);
  Var h = g.constant(Tensor(Shape::vec(m.dims().abs_hidden), 0.3));
  auto alpha = raw_attention(g, m, enc, h, Var{}).value().data;
  for (double a : alpha) CHECK(a == doctest::Approx(0.2));

  Model r = small_model(8);
  Graph g2(&r.params());
  auto enc2 = encode(g2, r, art);
  Var h2 = g2.constant(Tensor(Shape::vec(r.dims().abs_hidden), 0.3));
  Var c0 = g2.constant(Tensor(Shape::vec(5), 0.0));
  auto with_zero_cov = raw_attention(g2, r, enc2, h2, c0).value().data;
  auto without = raw_attention(g2, r, enc2, h2, Var{}).value().data;
  for (std::size_t i = 0; i < without.size(); ++i) CHECK(with_zero_cov[i] == doctest::Approx(without[i]).epsilon(1e-14));
}

TEST_CASE("final distribution limits") {
  Model m = small_model();
  Graph g(&m.params());
  auto art = index_article(segment(tokenize("a b a")), m.vocab());
  auto enc = encode(g, m, art);
  const int V = m.dims().vocab_size;
  Var h = g.constant(Tensor(Shape::vec(m.dims().abs_hidden), 0.1));
  Var emb = g.lookup(m.abs().embedding, kStartId);
  Var att = g.constant(Tensor::vec({0.2, 0.5, 0.3}));

  auto copy = decode_step(g, m, enc, art, h, emb, att, 0.0).final_dist.value().data;
  CHECK(copy[static_cast<std::size_t>(m.vocab().id("a"))] == doctest::Approx(0.5));
  CHECK(copy[static_cast<std::size_t>(m.vocab().id("b"))] == doctest::Approx(0.5));
  CHECK(std::accumulate(copy.begin(), copy.end(), 0.0) == doctest::Approx(1.0));

  auto oov = index_article(segment(tokenize("a zzz b")), m.vocab());
  auto enc2 = encode(g, m, oov);
  auto gen = decode_step(g, m, enc2, oov, h, emb, att, 1.0);
  const auto& fin = gen.final_dist.value().data;
  const auto& voc = gen.vocab_dist.value().data;
  REQUIRE(fin.size() == static_cast<std::size_t>(V + 1));
  for (int i = 0; i < V; ++i) CHECK(fin[static_cast<std::size_t>(i)] == doctest::Approx(voc[static_cast<std::size_t>(i)]));
  CHECK(fin[static_cast<std::size_t>(V)] == 0.0);

  auto half = decode_step(g, m, enc2, oov, h, emb, att, 0.5).final_dist.value().data;
  CHECK(half[static_cast<std::size_t>(V)] == doctest::Approx(0.5 * 0.5));
  CHECK(half[static_cast<std::size_t>(V)] > 0.0);
}

TEST_CASE("nll and coverage losses") {
  std::vector<std::vector<double>> exact{{0, 1, 0}, {1, 0, 0}};
  CHECK(nll_loss(exact, std::vector<int>{1, 0}) == 0.0);
  std::vector<std::vector<double>> uniform{std::vector<double>(10, 0.1)};
  CHECK(nll_loss(uniform, std::vector<int>{4}) == doctest::Approx(std::log(10.0)));
  std::vector<std::vector<double>> two{{0.5, 0.5, 0}, {0.25, 0.25, 0.5}};
  CHECK(nll_loss(two, std::vector<int>{0, 1}) == doctest::Approx((std::log(2.0) + std::log(4.0)) / 2));

  CHECK(coverage_loss(std::vector<std::vector<double>>{{0.3, 0.7}}) == 0.0);
  CHECK(coverage_loss(std::vector<std::vector<double>>{{0.3, 0.7}, {0.3, 0.7}}) == doctest::Approx(0.5));
  CHECK(coverage_loss(std::vector<std::vector<double>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == 0.0);

  std::vector<std::vector<double>> cov;
  std::vector<std::vector<double>> att{{0.25, 0.75}, {0.5, 0.5}, {1.0, 0.0}};
  coverage_loss(att, &cov);
  for (std::size_t t = 0; t < att.size(); ++t)
    CHECK(std::accumulate(cov[t].begin(), cov[t].end(), 0.0) == static_cast<double>(t));
}

TEST_CASE("decoding limits and beam of one") {
  Model m = small_model();
  auto art = index_article(segment(tokenize("a b c . d e .")), m.vocab());
  CHECK(decode(m, art, {}, {0, 1, false}).tokens.empty());
  auto greedy = decode(m, art, {}, {7, 1, true});
  CHECK(greedy.tokens.size() <= 7);
  CHECK(greedy.raw_attention.size() >= greedy.tokens.size());
  std::vector<double> beta{0.7, 0.2};
  auto a = decode(m, art, beta, {6, 1, true});
  auto b = decode(m, art, beta, {6, 1, true});
  CHECK(a.tokens == b.tokens);
  auto beam = decode(m, art, beta, {6, 3, true});
  CHECK(beam.tokens.size() <= 6);
}
