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

#include "nase/scorers.hpp"

#include <algorithm>
#include <cmath>

#include "nase/ops.hpp"

namespace nase {

const std::vector<ScoreFnKind>& AllScoreFnKinds() {
  static const std::vector<ScoreFnKind> kinds = {
      ScoreFnKind::kConvScore, ScoreFnKind::kTransE, ScoreFnKind::kDistMult,
      ScoreFnKind::kSimplE, ScoreFnKind::kMlp};
  return kinds;
}

std::string ScoreFnName(ScoreFnKind kind) {
  switch (kind) {
    case ScoreFnKind::kConvScore: return "conv_score";
    case ScoreFnKind::kTransE: return "transe";
    case ScoreFnKind::kDistMult: return "distmult";
    case ScoreFnKind::kSimplE: return "simple";
    case ScoreFnKind::kMlp: return "mlp";
  }
  return "?";
}

ScoreFnKind ParseScoreFnKind(const std::string& name) {
  for (ScoreFnKind k : AllScoreFnKinds()) {
    if (ScoreFnName(k) == name) return k;
  }
  throw Error("unknown score function '" + name + "'");
}

namespace {

template <typename T>
void RequireTriple(const char* prim, const Tensor<T>& h, const Tensor<T>& r,
                   const Tensor<T>& t) {
  if (h.rank() != 2 || h.shape() != r.shape() || h.shape() != t.shape()) {
    throw ShapeError(prim, {h.shape(), r.shape(), t.shape()});
  }
}

}  // namespace

template <typename T>
Tensor<T> ScoreTransE(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t, int p) {
  RequireTriple("transe", h, r, t);
  return ops::Affine(ops::PNorm(ops::Sub(ops::Add(h, r), t), p), T(-1), T(0));
}

template <typename T>
Tensor<T> ScoreDistMult(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t) {
  RequireTriple("distmult", h, r, t);
  return ops::SumLastAxis(ops::Mul(ops::Mul(h, r), t));
}

template <typename T>
Tensor<T> ScoreSimplE(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t,
                      const Tensor<T>& aux_rows) {
  RequireTriple("simple", h, r, t);
  if (aux_rows.shape() != h.shape()) {
    throw ShapeError("simple", {h.shape(), aux_rows.shape()}, "aux row length != d");
  }
  auto ht = ops::Mul(h, t);
  auto both = ops::Add(ops::Mul(ht, r), ops::Mul(ht, aux_rows));
  return ops::Affine(ops::SumLastAxis(both), T(0.5), T(0));
}

template <typename T>
Tensor<T> ScoreConv(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t,
                    const Tensor<T>& filters, const Tensor<T>& filter_bias,
                    const Tensor<T>& w) {
  RequireTriple("conv_score", h, r, t);
  const int64_t b = h.dim(0), d = h.dim(1);
  if (d < 3) throw ShapeError("conv_score", {h.shape()}, "dim must be >= 3");
  auto stacked = ops::Concat<T>({ops::Reshape(h, {b, 1, 1, d}), ops::Reshape(r, {b, 1, 1, d}),
                                 ops::Reshape(t, {b, 1, 1, d})},
                                2);
  auto conv = ops::Relu(
      ops::Conv2d(stacked, filters, filter_bias, ops::Padding::kValid, ops::Padding::kSame));
  const int64_t m = filters.dim(0);
  return ops::Reshape(ops::MatMul(ops::Reshape(conv, {b, m * d}), w), {b});
}

template <typename T>
Tensor<T> ScoreMlp(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t,
                   const Tensor<T>& w1, const Tensor<T>& b1, const Tensor<T>& w2,
                   const Tensor<T>& b2) {
  RequireTriple("mlp", h, r, t);
  const int64_t b = h.dim(0);
  auto x = ops::Concat<T>({h, r, t}, 1);
  auto hidden = ops::Relu(ops::AddBias(ops::MatMul(x, w1), b1));
  return ops::Reshape(ops::AddBias(ops::MatMul(hidden, w2), b2), {b});
}

template <typename T>
ScorerBank<T>::ScorerBank(const ModelConfig& cfg, const std::vector<ScoreFnKind>& kinds,
                          ParameterStore<T>& store, std::mt19937_64& rng)
    : cfg_(cfg), kinds_(kinds) {
  if (kinds_.empty()) throw Error("score hyperedge without candidates");
  const int64_t d = cfg.dim;
  for (ScoreFnKind k : kinds_) {
    switch (k) {
      case ScoreFnKind::kConvScore: {
        const int64_t m = cfg.conv_score_filters;
        conv_filters_ = store.AddUniform(
            "score.conv_score.filters", {m, 1, 3, 3},
            static_cast<T>(std::sqrt(6.0 / static_cast<double>(9 + 9 * m))), rng);
        conv_bias_ = store.AddZeros("score.conv_score.filter_bias", {m});
        conv_w_ = store.AddUniform(
            "score.conv_score.w", {m * d, 1},
            static_cast<T>(std::sqrt(6.0 / static_cast<double>(m * d + 1))), rng);
        break;
      }
      case ScoreFnKind::kSimplE:
        simple_aux_ = store.AddUniform("score.simple.aux_rel", {cfg.num_relations, d},
                                       static_cast<T>(6.0 / std::sqrt(static_cast<double>(d))),
                                       rng);
        break;
      case ScoreFnKind::kMlp: {
        const int64_t hdim = cfg.hidden();
        mlp_w1_ = store.AddUniform(
            "score.mlp.w1", {3 * d, hdim},
            static_cast<T>(std::sqrt(6.0 / static_cast<double>(3 * d + hdim))), rng);
        mlp_b1_ = store.AddZeros("score.mlp.b1", {hdim});
        mlp_w2_ = store.AddUniform(
            "score.mlp.w2", {hdim, 1},
            static_cast<T>(std::sqrt(6.0 / static_cast<double>(hdim + 1))), rng);
        mlp_b2_ = store.AddZeros("score.mlp.b2", {1});
        break;
      }
      case ScoreFnKind::kTransE:
      case ScoreFnKind::kDistMult:
        break;
    }
  }
}

template <typename T>
Tensor<T> ScorerBank<T>::Score(ScoreFnKind kind, const Embeddings<T>& e,
                               const std::vector<int64_t>& rels) const {
  if (std::find(kinds_.begin(), kinds_.end(), kind) == kinds_.end()) {
    throw Error("score function '" + ScoreFnName(kind) + "' not instantiated");
  }
  switch (kind) {
    case ScoreFnKind::kConvScore:
      return ScoreConv(e.head, e.rel, e.tail, conv_filters_, conv_bias_, conv_w_);
    case ScoreFnKind::kTransE:
      return ScoreTransE(e.head, e.rel, e.tail, cfg_.p_norm);
    case ScoreFnKind::kDistMult:
      return ScoreDistMult(e.head, e.rel, e.tail);
    case ScoreFnKind::kSimplE:
      return ScoreSimplE(e.head, e.rel, e.tail, ops::Gather(simple_aux_, rels));
    case ScoreFnKind::kMlp:
      return ScoreMlp(e.head, e.rel, e.tail, mlp_w1_, mlp_b1_, mlp_w2_, mlp_b2_);
  }
  throw Error("unhandled score function");
}

#define NASE_INSTANTIATE_SCORERS(T)                                                  \
  template Tensor<T> ScoreTransE(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                 int);                                               \
  template Tensor<T> ScoreDistMult(const Tensor<T>&, const Tensor<T>&,               \
                                   const Tensor<T>&);                                \
  template Tensor<T> ScoreSimplE(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                 const Tensor<T>&);                                  \
  template Tensor<T> ScoreConv(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                               const Tensor<T>&, const Tensor<T>&, const Tensor<T>&); \
  template Tensor<T> ScoreMlp(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,  \
                              const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,  \
                              const Tensor<T>&);                                     \
  template class ScorerBank<T>;

NASE_INSTANTIATE_SCORERS(float)
NASE_INSTANTIATE_SCORERS(double)

#undef NASE_INSTANTIATE_SCORERS

}  // namespace nase
