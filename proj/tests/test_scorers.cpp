// Copyright 2026 The NASE Authors.
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

#include <doctest.h>

#include <random>

#include "nase/scorers.hpp"

using namespace nase;
using T64 = Tensor<double>;

namespace {

T64 Row(std::vector<double> v) {
  const int64_t d = static_cast<int64_t>(v.size());
  return T64::Constant({1, d}, std::move(v));
}

T64 Rows(std::mt19937_64& rng, int64_t b, int64_t d) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(b * d);
  for (auto& x : v) x = u(rng);
  return T64::Constant({b, d}, v);
}

double One(const T64& t) {
  REQUIRE(t.numel() == 1);
  return t.data()[0];
}

// Scalar-loop oracle for a (1, 3, d) stack under an M x 3 x 3 kernel, valid
// over rows and same over columns, then ReLU and a dot with w.
double ConvScoreOracle(const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& filters, const std::vector<double>& bias,
                       const std::vector<double>& w) {
  const int64_t d = static_cast<int64_t>(rows[0].size());
  const int64_t m = static_cast<int64_t>(bias.size());
  double out = 0;
  for (int64_t f = 0; f < m; ++f) {
    for (int64_t j = 0; j < d; ++j) {
      double s = bias[f];
      for (int64_t a = 0; a < 3; ++a) {
        for (int64_t c = 0; c < 3; ++c) {
          const int64_t col = j + c - 1;
          if (col >= 0 && col < d) s += filters[f * 9 + a * 3 + c] * rows[a][col];
        }
      }
      out += std::max(s, 0.0) * w[f * d + j];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("score kinds: count and names round trip") {
  CHECK(AllScoreFnKinds().size() == 5);
  for (ScoreFnKind k : AllScoreFnKinds()) CHECK(ParseScoreFnKind(ScoreFnName(k)) == k);
  CHECK(ScoreFnName(ScoreFnKind::kSimplE) == "simple");
  CHECK_THROWS_AS(ParseScoreFnKind("complex"), Error);
}

TEST_CASE("transe examples") {
  CHECK(One(ScoreTransE(Row({1, 0}), Row({0, 1}), Row({1, 1}), 1)) == 0.0);
  CHECK(One(ScoreTransE(Row({1, 2}), Row({3, 4}), Row({0, 0}), 1)) == -10.0);
  CHECK(One(ScoreTransE(Row({3, 0}), Row({0, 4}), Row({0, 0}), 2)) ==
        doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("transe is non-positive and zero exactly at translation") {
  std::mt19937_64 rng(1);
  for (int p : {1, 2}) {
    const auto h = Rows(rng, 20, 5), r = Rows(rng, 20, 5), t = Rows(rng, 20, 5);
    const auto scores = ScoreTransE(h, r, t, p);
    for (double s : scores.data()) CHECK(s < 0.0);
  }
  const auto h = Row({0.5, 0.25}), r = Row({0.25, 0.5});
  CHECK(One(ScoreTransE(h, r, Row({0.75, 0.75}), 2)) == 0.0);
}

TEST_CASE("distmult examples and head/tail symmetry") {
  CHECK(One(ScoreDistMult(Row({1, 2}), Row({3, 4}), Row({5, 6}))) == 63.0);
  CHECK(One(ScoreDistMult(Row({1, 2}), Row({0, 0}), Row({5, 6}))) == 0.0);
  CHECK(One(ScoreDistMult(Row({1, 2}), Row({1, 1}), Row({5, 6}))) == 17.0);
  std::mt19937_64 rng(2);
  const auto h = Rows(rng, 10, 6), r = Rows(rng, 10, 6), t = Rows(rng, 10, 6);
  const auto a = ScoreDistMult(h, r, t), b = ScoreDistMult(t, r, h);
  for (int i = 0; i < 10; ++i) CHECK(a.data()[i] == doctest::Approx(b.data()[i]).epsilon(1e-14));
}

TEST_CASE("simple examples") {
  CHECK(One(ScoreSimplE(Row({1, 0}), Row({2, 3}), Row({1, 1}), Row({4, 5}))) == 3.0);
  CHECK(One(ScoreSimplE(Row({0, 0}), Row({2, 3}), Row({1, 1}), Row({4, 5}))) == 0.0);
  std::mt19937_64 rng(3);
  const auto h = Rows(rng, 10, 6), r = Rows(rng, 10, 6), t = Rows(rng, 10, 6);
  const auto s = ScoreSimplE(h, r, t, r), dm = ScoreDistMult(h, r, t);
  for (int i = 0; i < 10; ++i) CHECK(s.data()[i] == doctest::Approx(dm.data()[i]).epsilon(1e-14));
  CHECK_THROWS_AS(ScoreSimplE(Row({1, 0}), Row({2, 3}), Row({1, 1}), Row({4, 5, 6})),
                  ShapeError);
}

TEST_CASE("conv_score examples") {
  const auto ones = Row({1, 1, 1, 1});
  const auto filters = T64::Constant({1, 1, 3, 3}, std::vector<double>(9, 1.0));
  const auto bias = T64::Zeros({1});
  CHECK(One(ScoreConv(ones, ones, ones, filters, bias, T64::Zeros({4, 1}))) == 0.0);
  const double want = ConvScoreOracle({{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}},
                                      std::vector<double>(9, 1.0), {0.0}, {1, 1, 1, 1});
  CHECK(want == 30.0);
  CHECK(One(ScoreConv(ones, ones, ones, filters, bias,
                      T64::Constant({4, 1}, {1, 1, 1, 1}))) == want);
  CHECK_THROWS_AS(ScoreConv(Row({1, 1}), Row({1, 1}), Row({1, 1}),
                            filters, bias, T64::Zeros({2, 1})),
                  ShapeError);
}

TEST_CASE("conv_score matches the scalar oracle at random points") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  const int64_t d = 5, m = 3;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> rows(3, std::vector<double>(d));
    for (auto& row : rows) for (auto& x : row) x = u(rng);
    std::vector<double> f(m * 9), b(m), w(m * d);
    for (auto* v : {&f, &b, &w}) for (auto& x : *v) x = u(rng);
    const double got = One(ScoreConv(Row(rows[0]), Row(rows[1]), Row(rows[2]),
                                     T64::Constant({m, 1, 3, 3}, f), T64::Constant({m}, b),
                                     T64::Constant({m * d, 1}, w)));
    CHECK(got == doctest::Approx(ConvScoreOracle(rows, f, b, w)).epsilon(1e-12));
  }
}

TEST_CASE("mlp examples") {
  const auto ones = Row({1, 1});
  CHECK(One(ScoreMlp(ones, ones, ones, T64::Zeros({6, 3}), T64::Zeros({3}),
                     T64::Zeros({3, 1}), T64::Zeros({1}))) == 0.0);
  CHECK(One(ScoreMlp(ones, ones, ones, T64::Constant({6, 1}, std::vector<double>(6, 1.0)),
                     T64::Zeros({1}), T64::Constant({1, 1}, {1.0}), T64::Zeros({1}))) == 6.0);
  std::mt19937_64 rng(5);
  const auto h = Rows(rng, 4, 3), r = Rows(rng, 4, 3), t = Rows(rng, 4, 3);
  const auto s = ScoreMlp(h, r, t, Rows(rng, 9, 7), T64::Zeros({7}), Rows(rng, 7, 1),
                          T64::Zeros({1}));
  CHECK(s.shape() == Shape{4});
}

TEST_CASE("scorer bank owns the documented parameters") {
  ModelConfig cfg;
  cfg.num_entities = 6;
  cfg.num_relations = 3;
  cfg.dim = 4;
  cfg.conv_score_filters = 2;
  cfg.mlp_hidden = 5;
  std::mt19937_64 rng(6);
  ParameterStore<double> store;
  ScorerBank<double> bank(cfg, AllScoreFnKinds(), store, rng);
  CHECK(store.Get("score.conv_score.filters").tensor.shape() == Shape{2, 1, 3, 3});
  CHECK(store.Get("score.conv_score.w").tensor.shape() == Shape{8, 1});
  CHECK(store.Get("score.simple.aux_rel").tensor.shape() == Shape{3, 4});
  CHECK(store.Get("score.mlp.w1").tensor.shape() == Shape{12, 5});
  for (const auto& p : store.all()) CHECK(p->group == Group::kTheta);

  ParameterStore<double> bare;
  ScorerBank<double> plain(cfg, {ScoreFnKind::kTransE, ScoreFnKind::kDistMult}, bare, rng);
  CHECK(bare.all().empty());
  Embeddings<double> e{Rows(rng, 2, 4), Rows(rng, 2, 4), Rows(rng, 2, 4)};
  CHECK_THROWS_AS(plain.Score(ScoreFnKind::kMlp, e, {0, 1}), Error);
  for (ScoreFnKind k : AllScoreFnKinds()) CHECK(bank.Score(k, e, {0, 2}).shape() == Shape{2});
}

TEST_CASE("bank simple reads the aux row of each triple's relation") {
  ModelConfig cfg;
  cfg.num_entities = 2;
  cfg.num_relations = 2;
  cfg.dim = 2;
  std::mt19937_64 rng(7);
  ParameterStore<double> store;
  ScorerBank<double> bank(cfg, {ScoreFnKind::kSimplE}, store, rng);
  auto aux = store.Get("score.simple.aux_rel").tensor.mutable_data();
  const std::vector<double> rows = {0, 0, 4, 5};
  std::copy(rows.begin(), rows.end(), aux.begin());
  Embeddings<double> e{Row({1, 0}), Row({2, 3}), Row({1, 1})};
  CHECK(One(bank.Score(ScoreFnKind::kSimplE, e, {1})) == 3.0);
  CHECK(One(bank.Score(ScoreFnKind::kSimplE, e, {0})) == 1.0);
}
