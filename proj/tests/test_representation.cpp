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

#include <cmath>
#include <random>

#include "nase/ops.hpp"
#include "nase/representation.hpp"

using namespace nase;
using T64 = Tensor<double>;

namespace {

T64 Row(std::vector<double> v) {
  const int64_t d = static_cast<int64_t>(v.size());
  return T64::Constant({1, d}, std::move(v));
}

std::vector<double> Vec(const T64& t) { return {t.data().begin(), t.data().end()}; }

void Fill(ParameterStore<double>& store, const std::string& name, std::vector<double> v) {
  auto data = store.Get(name).tensor.mutable_data();
  REQUIRE(data.size() == v.size());
  std::copy(v.begin(), v.end(), data.begin());
}

std::vector<double> RandomVec(std::mt19937_64& rng, int64_t n) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

ModelConfig SmallConfig(int64_t d) {
  ModelConfig cfg;
  cfg.num_entities = 5;
  cfg.num_relations = 2;
  cfg.dim = d;
  cfg.reshape = std::array<int64_t, 2>{2, d / 2};
  cfg.conv_filters = 3;
  return cfg;
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar fusion oracle: beta = sigmoid(w . [o; n] + b).
std::vector<double> FuseOracle(const std::vector<double>& o, const std::vector<double>& n,
                               const std::vector<double>& w, double b) {
  double z = b;
  const size_t d = o.size();
  for (size_t i = 0; i < d; ++i) z += w[i] * o[i] + w[d + i] * n[i];
  const double beta = Sigmoid(z);
  std::vector<double> out(d);
  for (size_t i = 0; i < d; ++i) out[i] = beta * o[i] + (1 - beta) * n[i];
  return out;
}

}  // namespace

TEST_CASE("operator kinds: count and names round trip") {
  CHECK(AllOperatorKinds().size() == 7);
  for (OperatorKind k : AllOperatorKinds()) CHECK(ParseOperatorKind(OperatorName(k)) == k);
  CHECK(OperatorName(OperatorKind::kConv2dK5) == "conv2d_k5");
  CHECK_THROWS_AS(ParseOperatorKind("conv3d"), Error);
}

TEST_CASE("trans_ident examples") {
  const ModelConfig cfg = SmallConfig(2);
  OperatorParams<double> none;
  Embeddings<double> e{Row({1, 0}), Row({2, 3}), Row({5, 5})};
  CHECK(Vec(Reconstruct(Target::kHead, OperatorKind::kTransIdent, e, none, cfg)) ==
        std::vector<double>{3, 2});
  Embeddings<double> f{Row({1, 0}), Row({0, 1}), Row({7, 7})};
  CHECK(Vec(Reconstruct(Target::kTail, OperatorKind::kTransIdent, f, none, cfg)) ==
        std::vector<double>{1, 1});
  CHECK(Vec(Reconstruct(Target::kRel, OperatorKind::kTransIdent, f, none, cfg)) ==
        std::vector<double>{6, 7});
  Embeddings<double> g{Row({0.25, -1.5}), Row({2, 0.5}), Row({2.25, -1})};
  CHECK(Vec(Reconstruct(Target::kTail, OperatorKind::kTransIdent, g, none, cfg)) ==
        Vec(g.tail));
}

TEST_CASE("trans_ident owns no parameters; identity returns its own embedding") {
  const ModelConfig cfg = SmallConfig(4);
  ParameterStore<double> store;
  std::mt19937_64 rng(1);
  MakeOperatorParams<double>(OperatorKind::kTransIdent, cfg, "x", store, rng);
  MakeOperatorParams<double>(OperatorKind::kIdentity, cfg, "y", store, rng);
  CHECK(store.all().empty());
  Embeddings<double> e{Row({1, 2, 3, 4}), Row({5, 6, 7, 8}), Row({9, 1, 2, 3})};
  CHECK(Vec(Reconstruct(Target::kRel, OperatorKind::kIdentity, e, {}, cfg)) == Vec(e.rel));
}

TEST_CASE("trans_full applies learned maps with the translation sign pattern") {
  const ModelConfig cfg = SmallConfig(2);
  ParameterStore<double> store;
  std::mt19937_64 rng(1);
  auto p = MakeOperatorParams<double>(OperatorKind::kTransFull, cfg, "tf", store, rng);
  Fill(store, "tf.mat_a", {1, 2, 0, 1});
  Fill(store, "tf.mat_b", {0, 1, 1, 0});
  Embeddings<double> e{Row({1, 2}), Row({3, 4}), Row({5, 6})};
  // Row vectors times the maps: A.e_b - B.e_a for head with (e_a, e_b) = (r, t).
  const auto h = Vec(Reconstruct(Target::kHead, OperatorKind::kTransFull, e, p, cfg));
  const auto t = Vec(Reconstruct(Target::kTail, OperatorKind::kTransFull, e, p, cfg));
  auto map = [](const std::vector<double>& m, std::vector<double> x) {
    return std::vector<double>{x[0] * m[0] + x[1] * m[2], x[0] * m[1] + x[1] * m[3]};
  };
  const auto at = map({1, 2, 0, 1}, {5, 6}), br = map({0, 1, 1, 0}, {3, 4});
  CHECK(h == std::vector<double>{at[0] - br[0], at[1] - br[1]});
  const auto ah = map({1, 2, 0, 1}, {1, 2}), br2 = map({0, 1, 1, 0}, {3, 4});
  CHECK(t == std::vector<double>{ah[0] + br2[0], ah[1] + br2[1]});
}

TEST_CASE("conv1d_k2 with unit filters and averaging projection matches a scalar loop") {
  const int64_t d = 5, f = 3, k = 2;
  ModelConfig cfg = SmallConfig(d);
  cfg.reshape.reset();
  ParameterStore<double> store;
  std::mt19937_64 rng(1);
  auto p = MakeOperatorParams<double>(OperatorKind::kConv1dK2, cfg, "c", store, rng);
  Fill(store, "c.filters", std::vector<double>(f * 2 * k, 1.0));
  std::vector<double> proj(f * d * d, 0.0);
  for (int64_t fi = 0; fi < f; ++fi) {
    for (int64_t i = 0; i < d; ++i) proj[(fi * d + i) * d + i] = 1.0 / f;
  }
  Fill(store, "c.proj", proj);
  Embeddings<double> e{Row(std::vector<double>(d, 1)), Row(std::vector<double>(d, 1)),
                       Row(std::vector<double>(d, 9))};
  // Oracle: two channels, left pad 1 for k = 2.
  std::vector<double> want(d);
  for (int64_t i = 0; i < d; ++i) {
    double s = 0;
    for (int64_t c = 0; c < 2; ++c) {
      for (int64_t j = 0; j < k; ++j) {
        const int64_t pos = i + j - 1;
        if (pos >= 0 && pos < d) s += 1.0;
      }
    }
    want[i] = std::max(s, 0.0);
  }
  CHECK(want == std::vector<double>{2, 4, 4, 4, 4});
  const auto got = Vec(Reconstruct(Target::kTail, OperatorKind::kConv1dK2, e, p, cfg));
  for (int64_t i = 0; i < d; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("conv2d requires a factorization of d") {
  ModelConfig cfg = SmallConfig(6);
  cfg.reshape.reset();
  cfg.dim = 7;
  ParameterStore<double> store;
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(MakeOperatorParams<double>(OperatorKind::kConv2dK3, cfg, "c", store, rng),
                  Error);
  cfg.reshape = std::array<int64_t, 2>{2, 3};
  CHECK_THROWS_AS(cfg.ResolvedReshape(), Error);
}

TEST_CASE("conv2d reconstruction has shape (B, d)") {
  const ModelConfig cfg = SmallConfig(6);
  ParameterStore<double> store;
  std::mt19937_64 rng(2);
  auto p = MakeOperatorParams<double>(OperatorKind::kConv2dK5, cfg, "c", store, rng);
  Embeddings<double> e{T64::Constant({3, 6}, RandomVec(rng, 18)),
                       T64::Constant({3, 6}, RandomVec(rng, 18)),
                       T64::Constant({3, 6}, RandomVec(rng, 18))};
  CHECK(Reconstruct(Target::kHead, OperatorKind::kConv2dK5, e, p, cfg).shape() == Shape{3, 6});
}

TEST_CASE("fuse examples") {
  const auto o = Row({1, -2, 3}), n = Row({3, 2, -1});
  const auto w0 = T64::Zeros({6, 1});
  CHECK(Vec(Fuse(o, n, w0, T64::Scalar1(0))) == std::vector<double>{2, 0, 1});
  const auto sat = Vec(Fuse(o, n, w0, T64::Scalar1(20)));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(sat[i] - Vec(o)[i]) < 1e-6);
  CHECK(Vec(FuseAdd(o, n)) == std::vector<double>{2, 0, 1});
  CHECK_THROWS_AS(Fuse(o, n, T64::Zeros({4, 1}), T64::Scalar1(0)), ShapeError);
}

TEST_CASE("fuse output is an elementwise convex combination") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto o = RandomVec(rng, 6), n = RandomVec(rng, 6), w = RandomVec(rng, 12);
    const double b = RandomVec(rng, 1)[0] * 3;
    const auto out = Vec(Fuse(Row(o), Row(n), T64::Constant({12, 1}, w), T64::Scalar1(b)));
    const auto want = FuseOracle(o, n, w, b);
    for (int i = 0; i < 6; ++i) {
      CHECK(out[i] >= std::min(o[i], n[i]) - 1e-15);
      CHECK(out[i] <= std::max(o[i], n[i]) + 1e-15);
      CHECK(out[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("all-identity layer is an exact fixed point and owns no parameters") {
  const ModelConfig cfg = SmallConfig(4);
  ParameterStore<double> store;
  std::mt19937_64 rng(4);
  const std::vector<OperatorKind> id = {OperatorKind::kIdentity};
  RepresentationLayer<double> layer(0, cfg, {id, id, id}, store, rng);
  CHECK(store.all().empty());
  Embeddings<double> e{T64::Constant({2, 4}, RandomVec(rng, 8)),
                       T64::Constant({2, 4}, RandomVec(rng, 8)),
                       T64::Constant({2, 4}, RandomVec(rng, 8))};
  const auto out = layer.Forward(e, {}, {0, 1});
  CHECK(Vec(out.head) == Vec(e.head));
  CHECK(Vec(out.rel) == Vec(e.rel));
  CHECK(Vec(out.tail) == Vec(e.tail));
}

TEST_CASE("gate starts at beta = 0.5") {
  const ModelConfig cfg = SmallConfig(2);
  ParameterStore<double> store;
  std::mt19937_64 rng(4);
  const std::vector<OperatorKind> ti = {OperatorKind::kTransIdent};
  RepresentationLayer<double> layer(0, cfg, {ti, ti, ti}, store, rng);
  Embeddings<double> e{Row({1, 0}), Row({0, 1}), Row({3, 3})};
  const auto out = layer.Forward(e, {}, {0});
  CHECK(Vec(out.tail) == std::vector<double>{2, 2});  // (t + (h + r)) / 2
  CHECK(Vec(out.head) == std::vector<double>{2, 1});  // (h + (t - r)) / 2
}

TEST_CASE("two trans_ident layers equal a hand-composed reconstruction and fusion") {
  const int64_t d = 3;
  const ModelConfig cfg = SmallConfig(4);
  ModelConfig c3 = cfg;
  c3.dim = d;
  c3.reshape.reset();
  ParameterStore<double> store;
  std::mt19937_64 rng(5);
  const std::vector<OperatorKind> ti = {OperatorKind::kTransIdent};
  RepresentationLayer<double> l0(0, c3, {ti, ti, ti}, store, rng);
  RepresentationLayer<double> l1(1, c3, {ti, ti, ti}, store, rng);
  std::map<std::string, std::vector<double>> w;
  std::map<std::string, double> b;
  for (int l = 0; l < 2; ++l) {
    for (char t : {'h', 'r', 't'}) {
      const std::string p = "rep.l" + std::to_string(l) + "." + t;
      w[p] = RandomVec(rng, 2 * d);
      b[p] = RandomVec(rng, 1)[0];
      Fill(store, p + ".gate_w", w[p]);
      Fill(store, p + ".gate_b", {b[p]});
    }
  }
  std::vector<double> h = RandomVec(rng, d), r = RandomVec(rng, d), t = RandomVec(rng, d);
  Embeddings<double> e{Row(h), Row(r), Row(t)};
  e = l1.Forward(l0.Forward(e, {}, {0}), {}, {0});

  for (int l = 0; l < 2; ++l) {
    const std::string p = "rep.l" + std::to_string(l) + ".";
    std::vector<double> nh(d), nr(d), nt(d);
    for (int64_t i = 0; i < d; ++i) {
      nh[i] = t[i] - r[i];
      nr[i] = t[i] - h[i];
      nt[i] = h[i] + r[i];
    }
    auto h2 = FuseOracle(h, nh, w[p + "h"], b[p + "h"]);
    auto r2 = FuseOracle(r, nr, w[p + "r"], b[p + "r"]);
    auto t2 = FuseOracle(t, nt, w[p + "t"], b[p + "t"]);
    h = h2;
    r = r2;
    t = t2;
  }
  const auto gh = Vec(e.head), gr = Vec(e.rel), gt = Vec(e.tail);
  for (int64_t i = 0; i < d; ++i) {
    CHECK(gh[i] == doctest::Approx(h[i]).epsilon(1e-12));
    CHECK(gr[i] == doctest::Approx(r[i]).epsilon(1e-12));
    CHECK(gt[i] == doctest::Approx(t[i]).epsilon(1e-12));
  }
}

TEST_CASE("mixture equals the softmax-weighted candidate sum, fused once") {
  const ModelConfig cfg = SmallConfig(4);
  ParameterStore<double> store;
  std::mt19937_64 rng(6);
  const auto& all = AllOperatorKinds();
  RepresentationLayer<double> layer(0, cfg, {all, all, all}, store, rng);
  Fill(store, "rep.l0.t.gate_w", RandomVec(rng, 8));
  Fill(store, "rep.l0.t.gate_b", {0.3});
  Embeddings<double> e{T64::Constant({2, 4}, RandomVec(rng, 8)),
                       T64::Constant({2, 4}, RandomVec(rng, 8)),
                       T64::Constant({2, 4}, RandomVec(rng, 8))};
  const auto alpha = RandomVec(rng, 7);
  const auto weights = ops::Softmax(T64::Constant({7}, alpha));
  const auto out = layer.Forward(e, {weights, weights, weights}, {0, 1});

  auto param = [&](const std::string& name) {
    return store.Contains(name) ? store.Get(name).tensor : T64();
  };
  std::vector<double> mix(8, 0.0);
  for (size_t i = 0; i < all.size(); ++i) {
    const std::string p = "rep.l0.t." + OperatorName(all[i]);
    OperatorParams<double> op{param(p + ".filters"), param(p + ".filter_bias"),
                              param(p + ".proj"),    param(p + ".proj_bias"),
                              param(p + ".mat_a"),   param(p + ".mat_b")};
    const auto c = Vec(Reconstruct(Target::kTail, all[i], e, op, cfg));
    for (int j = 0; j < 8; ++j) mix[j] += weights.data()[i] * c[j];
  }
  const auto want = Vec(Fuse(e.tail, T64::Constant({2, 4}, mix), param("rep.l0.t.gate_w"),
                             param("rep.l0.t.gate_b")));
  const auto got = Vec(out.tail);
  for (int j = 0; j < 8; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-12));
}

TEST_CASE("mixture concentrated on identity stays within 1e-5 of the input") {
  const ModelConfig cfg = SmallConfig(4);
  ParameterStore<double> store;
  std::mt19937_64 rng(7);
  const auto& all = AllOperatorKinds();
  RepresentationLayer<double> layer(0, cfg, {all, all, all}, store, rng);
  std::vector<double> alpha(7, 0.0);
  alpha[6] = 20.0;
  const auto weights = ops::Softmax(T64::Constant({7}, alpha));
  CHECK(weights.data()[6] > 1 - 1e-6);
  Embeddings<double> e{T64::Constant({2, 4}, RandomVec(rng, 8)),
                       T64::Constant({2, 4}, RandomVec(rng, 8)),
                       T64::Constant({2, 4}, RandomVec(rng, 8))};
  const auto out = layer.Forward(e, {weights, weights, weights}, {0, 1});
  for (auto [got, want] : {std::pair{Vec(out.head), Vec(e.head)},
                           std::pair{Vec(out.rel), Vec(e.rel)},
                           std::pair{Vec(out.tail), Vec(e.tail)}}) {
    for (int j = 0; j < 8; ++j) CHECK(std::abs(got[j] - want[j]) < 1e-5);
  }
}

TEST_CASE("targets update simultaneously") {
  const ModelConfig cfg = SmallConfig(2);
  std::mt19937_64 rng(8);
  const std::vector<OperatorKind> ti = {OperatorKind::kTransIdent};
  const std::vector<OperatorKind> id = {OperatorKind::kIdentity};
  Embeddings<double> e{Row({1, 2}), Row({3, 5}), Row({-1, 4})};
  // Each target alone in an otherwise identity layer gives the same value
  // as in the full layer, so no target reads another's update.
  ParameterStore<double> s_all;
  RepresentationLayer<double> full(0, cfg, {ti, ti, ti}, s_all, rng);
  const auto out = full.Forward(e, {}, {0});
  ParameterStore<double> s_h, s_r, s_t;
  const auto h = RepresentationLayer<double>(0, cfg, {ti, id, id}, s_h, rng).Forward(e, {}, {0});
  const auto r = RepresentationLayer<double>(0, cfg, {id, ti, id}, s_r, rng).Forward(e, {}, {0});
  const auto t = RepresentationLayer<double>(0, cfg, {id, id, ti}, s_t, rng).Forward(e, {}, {0});
  CHECK(Vec(out.head) == Vec(h.head));
  CHECK(Vec(out.rel) == Vec(r.rel));
  CHECK(Vec(out.tail) == Vec(t.tail));
}

TEST_CASE("mixture without weights is rejected") {
  const ModelConfig cfg = SmallConfig(4);
  ParameterStore<double> store;
  std::mt19937_64 rng(9);
  const auto& all = AllOperatorKinds();
  RepresentationLayer<double> layer(0, cfg, {all, all, all}, store, rng);
  Embeddings<double> e{T64::Zeros({1, 4}), T64::Zeros({1, 4}), T64::Zeros({1, 4})};
  CHECK_THROWS_AS(layer.Forward(e, {}, {0}), ShapeError);
}
