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
#include <random>

#include "common.hpp"
#include "diffcore.hpp"
#include "doctest.h"
#include "fusion.hpp"
#include "oracles.hpp"

using namespace unisum;

TEST_CASE("combine") {
  const std::vector<int> sent{0, 1};
  auto f = combine(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.5}, sent);
  CHECK(f[0] == doctest::Approx(2.0 / 3.0));
  CHECK(f[1] == doctest::Approx(1.0 / 3.0));

  const std::vector<double> alpha{0.1, 0.6, 0.3};
  const std::vector<int> s3{0, 0, 1};
  CHECK(combine(alpha, std::vector<double>{0.4, 0.4}, s3) == alpha);
  CHECK(combine(std::vector<double>{0, 1, 0}, std::vector<double>{0.3, 0.9}, s3) == std::vector<double>{0, 1, 0});
  CHECK_THROWS_AS(combine(std::vector<double>{1, 0, 0}, std::vector<double>{0.0, 1.0}, s3), DegenerateAttention);
}

TEST_CASE("combine matches the direct formula on random instances") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<double> beta(static_cast<std::size_t>(n)), alpha(2 + rng() % 10);
    std::vector<int> sent(alpha.size());
    for (double& b : beta) b = u(rng);
    double z = 0;
    for (double& a : alpha) z += (a = u(rng));
    for (double& a : alpha) a /= z;
    for (std::size_t m = 0; m < sent.size(); ++m) sent[m] = static_cast<int>(m * static_cast<std::size_t>(n) / sent.size());
    auto got = combine(alpha, beta, sent);
    auto want = oracle::fuse(alpha, beta, sent);
    for (std::size_t m = 0; m < got.size(); ++m) CHECK(std::abs(got[m] - want[m]) < 1e-12);
  }
}

TEST_CASE("top-k breaks ties toward the lower index") {
  CHECK(top_k(std::vector<double>{0.2, 0.5, 0.2, 0.1}, 2) == std::vector<int>{1, 0});
  CHECK(top_k(std::vector<double>{1, 1, 1}, 2) == std::vector<int>{0, 1});
}

TEST_CASE("inconsistency loss values") {
  const std::vector<int> sent{0, 0, 1, 1};
  std::vector<std::vector<double>> one_hot{{0, 0, 1, 0}};
  CHECK(inconsistency_loss(one_hot, std::vector<double>{0.2, 1.0}, sent, 1) == doctest::Approx(0.0));

  std::vector<std::vector<double>> uniform{{0.25, 0.25, 0.25, 0.25}};
  CHECK(inconsistency_loss(uniform, std::vector<double>{1.0, 1.0}, sent, 3) == doctest::Approx(std::log(4.0)));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> alphas(3, std::vector<double>(4));
    for (auto& a : alphas) {
      double z = 0;
      for (double& v : a) z += (v = u(rng) + 1e-3);
      for (double& v : a) v /= z;
    }
    CHECK(inconsistency_loss(alphas, std::vector<double>{u(rng), u(rng)}, sent, 3) >= 0.0);
  }
}

TEST_CASE("inconsistency loss graph agrees with the plain version") {
  Graph g;
  const std::vector<int> sent{0, 1, 1, 2};
  const std::vector<std::vector<double>> a{{0.1, 0.2, 0.3, 0.4}, {0.7, 0.1, 0.1, 0.1}};
  const std::vector<double> beta{0.9, 0.2, 0.6};
  std::vector<Var> vars;
  for (const auto& x : a) vars.push_back(g.constant(Tensor::vec(x)));
  Var loss = inconsistency_loss(vars, g.constant(Tensor::vec(beta)), sent, 3);
  CHECK(loss.item() == doctest::Approx(inconsistency_loss(a, beta, sent, 3)).epsilon(1e-12));
}

TEST_CASE("inconsistency rate") {
  const std::vector<int> single{0, 0, 0};
  std::vector<std::vector<double>> alphas{{1, 0, 0}, {0, 1, 0}};
  CHECK(inconsistency_rate(alphas, std::vector<double>{0.3}, single).rate == 0.0);

  const std::vector<int> sent{0, 0, 1, 1};
  const std::vector<double> beta{0.9, 0.1};
  std::vector<std::vector<double>> four{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0.6, 0, 0, 0.4}};
  auto r = inconsistency_rate(four, beta, sent);
  CHECK(r.rate == 0.25);
  CHECK(r.steps == std::vector<int>{2});
}
