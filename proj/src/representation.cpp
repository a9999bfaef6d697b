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

#include "nase/representation.hpp"

#include <cmath>

#include "nase/ops.hpp"

namespace nase {

const std::vector<OperatorKind>& AllOperatorKinds() {
  static const std::vector<OperatorKind> kinds = {
      OperatorKind::kConv1dK2,   OperatorKind::kConv1dK4, OperatorKind::kConv2dK3,
      OperatorKind::kConv2dK5,   OperatorKind::kTransIdent,
      OperatorKind::kTransFull,  OperatorKind::kIdentity};
  return kinds;
}

std::string OperatorName(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kConv1dK2: return "conv1d_k2";
    case OperatorKind::kConv1dK4: return "conv1d_k4";
    case OperatorKind::kConv2dK3: return "conv2d_k3";
    case OperatorKind::kConv2dK5: return "conv2d_k5";
    case OperatorKind::kTransIdent: return "trans_ident";
    case OperatorKind::kTransFull: return "trans_full";
    case OperatorKind::kIdentity: return "identity";
  }
  return "?";
}

OperatorKind ParseOperatorKind(const std::string& name) {
  for (OperatorKind k : AllOperatorKinds()) {
    if (OperatorName(k) == name) return k;
  }
  throw Error("unknown operator kind '" + name + "'");
}

char TargetLetter(Target t) {
  switch (t) {
    case Target::kHead: return 'h';
    case Target::kRel: return 'r';
    case Target::kTail: return 't';
  }
  return '?';
}

std::string FusionModeName(FusionMode mode) {
  return mode == FusionMode::kGated ? "gated" : "add";
}

FusionMode ParseFusionMode(const std::string& name) {
  if (name == "gated") return FusionMode::kGated;
  if (name == "add") return FusionMode::kAdd;
  throw Error("unknown fusion mode '" + name + "' (expected gated|add)");
}

std::array<int64_t, 2> ModelConfig::ResolvedReshape() const {
  if (reshape) {
    if ((*reshape)[0] < 1 || (*reshape)[1] < 1 || (*reshape)[0] * (*reshape)[1] != dim) {
      throw Error("reshape " + std::to_string((*reshape)[0]) + "x" +
                  std::to_string((*reshape)[1]) + " does not factor dim " +
                  std::to_string(dim));
    }
    return *reshape;
  }
  if (dim == 400) return {20, 20};
  throw Error("conv2d operators need an explicit reshape for dim " +
              std::to_string(dim));
}

template <typename T>
const Tensor<T>& Embeddings<T>::of(Target t) const {
  switch (t) {
    case Target::kHead: return head;
    case Target::kRel: return rel;
    case Target::kTail: return tail;
  }
  return head;
}

namespace {

bool IsConv1d(OperatorKind k) {
  return k == OperatorKind::kConv1dK2 || k == OperatorKind::kConv1dK4;
}
bool IsConv2d(OperatorKind k) {
  return k == OperatorKind::kConv2dK3 || k == OperatorKind::kConv2dK5;
}
int64_t KernelSize(OperatorKind k) {
  switch (k) {
    case OperatorKind::kConv1dK2: return 2;
    case OperatorKind::kConv1dK4: return 4;
    case OperatorKind::kConv2dK3: return 3;
    case OperatorKind::kConv2dK5: return 5;
    default: return 0;
  }
}

template <typename T>
T XavierBound(int64_t fan_in, int64_t fan_out) {
  return static_cast<T>(std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)));
}

// The two non-target operands in canonical order.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> Operands(Target target, const Embeddings<T>& e) {
  switch (target) {
    case Target::kHead: return {e.rel, e.tail};
    case Target::kRel: return {e.head, e.tail};
    case Target::kTail: return {e.head, e.rel};
  }
  return {e.rel, e.tail};
}

template <typename T>
Tensor<T> Linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  return ops::AddBias(ops::MatMul(x, w), b);
}

template <typename T>
Tensor<T> ApplyMap(const Tensor<T>& x, const Tensor<T>& map, const ModelConfig& cfg,
                   const std::vector<int64_t>& rels) {
  if (!cfg.per_relation_translation) return ops::MatMul(x, map);
  const int64_t b = x.dim(0), d = x.dim(1);
  if (static_cast<int64_t>(rels.size()) != b) {
    throw ShapeError("trans_full", {x.shape()}, "per-relation maps need relation ids");
  }
  // Row i of the table is the row-major d x d map M with out = M x.
  auto mats = ops::Reshape(ops::Gather(map, rels), {b, d, d});
  return ops::BatchedMatVec(mats, x);
}

}  // namespace

template <typename T>
OperatorParams<T> MakeOperatorParams(OperatorKind kind, const ModelConfig& cfg,
                                     const std::string& prefix,
                                     ParameterStore<T>& store, std::mt19937_64& rng) {
  OperatorParams<T> p;
  const int64_t d = cfg.dim, f = cfg.conv_filters;
  if (IsConv1d(kind)) {
    const int64_t k = KernelSize(kind);
    p.filters = store.AddUniform(prefix + ".filters", {f, 2, k},
                                 XavierBound<T>(2 * k, f * k), rng);
    p.filter_bias = store.AddZeros(prefix + ".filter_bias", {f});
    p.proj = store.AddUniform(prefix + ".proj", {f * d, d}, XavierBound<T>(f * d, d), rng);
    p.proj_bias = store.AddZeros(prefix + ".proj_bias", {d});
  } else if (IsConv2d(kind)) {
    cfg.ResolvedReshape();
    const int64_t k = KernelSize(kind);
    p.filters = store.AddUniform(prefix + ".filters", {f, 1, k, k},
                                 XavierBound<T>(k * k, f * k * k), rng);
    p.filter_bias = store.AddZeros(prefix + ".filter_bias", {f});
    p.proj = store.AddUniform(prefix + ".proj", {f * 2 * d, d},
                              XavierBound<T>(f * 2 * d, d), rng);
    p.proj_bias = store.AddZeros(prefix + ".proj_bias", {d});
  } else if (kind == OperatorKind::kTransFull) {
    const T bound = XavierBound<T>(d, d);
    if (cfg.per_relation_translation) {
      p.mat_a = store.AddUniform(prefix + ".mat_a", {cfg.num_relations, d * d}, bound, rng);
      p.mat_b = store.AddUniform(prefix + ".mat_b", {cfg.num_relations, d * d}, bound, rng);
    } else {
      p.mat_a = store.AddUniform(prefix + ".mat_a", {d, d}, bound, rng);
      p.mat_b = store.AddUniform(prefix + ".mat_b", {d, d}, bound, rng);
    }
  }
  return p;
}

template <typename T>
Tensor<T> Reconstruct(Target target, OperatorKind kind, const Embeddings<T>& embs,
                      const OperatorParams<T>& params, const ModelConfig& cfg,
                      const std::vector<int64_t>& rels) {
  const auto [ea, eb] = Operands(target, embs);
  if (ea.rank() != 2 || ea.shape() != eb.shape() || ea.dim(1) != cfg.dim) {
    throw ShapeError("reconstruct", {ea.shape(), eb.shape()},
                     "expected (B, " + std::to_string(cfg.dim) + ")");
  }
  const int64_t b = ea.dim(0), d = cfg.dim;
  if (IsConv1d(kind)) {
    auto stacked = ops::Concat<T>({ops::Reshape(ea, {b, 1, d}), ops::Reshape(eb, {b, 1, d})}, 1);
    auto conv = ops::Relu(ops::Conv1dSame(stacked, params.filters, params.filter_bias));
    const int64_t f = params.filters.dim(0);
    return Linear(ops::Reshape(conv, {b, f * d}), params.proj, params.proj_bias);
  }
  if (IsConv2d(kind)) {
    const auto [rows, cols] = cfg.ResolvedReshape();
    auto stacked = ops::Concat<T>(
        {ops::Reshape(ea, {b, 1, rows, cols}), ops::Reshape(eb, {b, 1, rows, cols})}, 2);
    auto conv = ops::Relu(ops::Conv2dSame(stacked, params.filters, params.filter_bias));
    const int64_t f = params.filters.dim(0);
    return Linear(ops::Reshape(conv, {b, f * 2 * d}), params.proj, params.proj_bias);
  }
  switch (kind) {
    case OperatorKind::kTransIdent:
      return target == Target::kTail ? ops::Add(ea, eb) : ops::Sub(eb, ea);
    case OperatorKind::kTransFull: {
      if (target == Target::kTail) {
        return ops::Add(ApplyMap(ea, params.mat_a, cfg, rels),
                        ApplyMap(eb, params.mat_b, cfg, rels));
      }
      return ops::Sub(ApplyMap(eb, params.mat_a, cfg, rels),
                      ApplyMap(ea, params.mat_b, cfg, rels));
    }
    case OperatorKind::kIdentity:
      return embs.of(target);
    default:
      break;
  }
  throw Error("unhandled operator kind");
}

template <typename T>
Tensor<T> Fuse(const Tensor<T>& e_orig, const Tensor<T>& e_new, const Tensor<T>& w,
               const Tensor<T>& b) {
  if (e_orig.rank() != 2 || e_orig.shape() != e_new.shape() || w.rank() != 2 ||
      w.dim(0) != 2 * e_orig.dim(1) || w.dim(1) != 1 || b.numel() != 1) {
    throw ShapeError("fuse", {e_orig.shape(), e_new.shape(), w.shape(), b.shape()});
  }
  auto joined = ops::Concat<T>({e_orig, e_new}, 1);
  auto beta = ops::Sigmoid(ops::AddBias(ops::MatMul(joined, w), b));  // (B, 1)
  return ops::Add(e_new, ops::ScaleRows(ops::Sub(e_orig, e_new), beta));
}

template <typename T>
Tensor<T> FuseAdd(const Tensor<T>& e_orig, const Tensor<T>& e_new) {
  return ops::Affine(ops::Add(e_orig, e_new), T(0.5), T(0));
}

template <typename T>
RepresentationLayer<T>::RepresentationLayer(
    int layer, const ModelConfig& cfg,
    const std::array<std::vector<OperatorKind>, 3>& candidates,
    ParameterStore<T>& store, std::mt19937_64& rng)
    : cfg_(cfg) {
  for (Target t : kTargets) {
    auto& st = targets_[static_cast<int>(t)];
    st.candidates = candidates[static_cast<int>(t)];
    if (st.candidates.empty()) throw Error("representation hyperedge without candidates");
    const std::string prefix =
        "rep.l" + std::to_string(layer) + "." + std::string(1, TargetLetter(t));
    bool needs_gate = false;
    for (OperatorKind k : st.candidates) needs_gate |= k != OperatorKind::kIdentity;
    if (needs_gate && cfg.fusion == FusionMode::kGated) {
      st.gate_w = store.AddZeros(prefix + ".gate_w", {2 * cfg.dim, 1});
      st.gate_b = store.AddZeros(prefix + ".gate_b", {1});
    }
    for (OperatorKind k : st.candidates) {
      st.params.push_back(
          MakeOperatorParams<T>(k, cfg, prefix + "." + OperatorName(k), store, rng));
    }
  }
}

template <typename T>
Tensor<T> RepresentationLayer<T>::ForwardTarget(Target t, const Embeddings<T>& in,
                                                const Tensor<T>& weights,
                                                const std::vector<int64_t>& rels) const {
  const auto& st = targets_[static_cast<int>(t)];
  const Tensor<T>& own = in.of(t);
  Tensor<T> fresh;
  if (st.candidates.size() == 1) {
    if (st.candidates[0] == OperatorKind::kIdentity) return own;
    fresh = Reconstruct(t, st.candidates[0], in, st.params[0], cfg_, rels);
  } else {
    if (!weights.defined() || weights.numel() != static_cast<int64_t>(st.candidates.size())) {
      throw ShapeError("layer_forward", {weights.defined() ? weights.shape() : Shape{}},
                       "mixture needs one weight per candidate");
    }
    for (size_t i = 0; i < st.candidates.size(); ++i) {
      auto term = ops::Scale(Reconstruct(t, st.candidates[i], in, st.params[i], cfg_, rels),
                             ops::Pick(weights, static_cast<int64_t>(i)));
      fresh = fresh.defined() ? ops::Add(fresh, term) : term;
    }
  }
  if (cfg_.fusion == FusionMode::kAdd) return FuseAdd(own, fresh);
  return Fuse(own, fresh, st.gate_w, st.gate_b);
}

template <typename T>
Embeddings<T> RepresentationLayer<T>::Forward(const Embeddings<T>& in,
                                              const std::array<Tensor<T>, 3>& mix_weights,
                                              const std::vector<int64_t>& rels) const {
  Embeddings<T> out;
  out.head = ForwardTarget(Target::kHead, in, mix_weights[0], rels);
  out.rel = ForwardTarget(Target::kRel, in, mix_weights[1], rels);
  out.tail = ForwardTarget(Target::kTail, in, mix_weights[2], rels);
  return out;
}

#define NASE_INSTANTIATE_REP(T)                                                    \
  template struct Embeddings<T>;                                                   \
  template OperatorParams<T> MakeOperatorParams(OperatorKind, const ModelConfig&,  \
                                                const std::string&,                \
                                                ParameterStore<T>&, std::mt19937_64&); \
  template Tensor<T> Reconstruct(Target, OperatorKind, const Embeddings<T>&,      \
                                 const OperatorParams<T>&, const ModelConfig&,     \
                                 const std::vector<int64_t>&);                     \
  template Tensor<T> Fuse(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,    \
                          const Tensor<T>&);                                       \
  template Tensor<T> FuseAdd(const Tensor<T>&, const Tensor<T>&);                  \
  template class RepresentationLayer<T>;

NASE_INSTANTIATE_REP(float)
NASE_INSTANTIATE_REP(double)

#undef NASE_INSTANTIATE_REP

}  // namespace nase
