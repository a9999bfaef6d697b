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

#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nase/optim.hpp"
#include "nase/tensor.hpp"

namespace nase {

// Candidate reconstructors of one representation hyperedge, in canonical
// enumeration order.
enum class OperatorKind {
  kConv1dK2,
  kConv1dK4,
  kConv2dK3,
  kConv2dK5,
  kTransIdent,
  kTransFull,
  kIdentity,
};

inline constexpr int kNumOperatorKinds = 7;
const std::vector<OperatorKind>& AllOperatorKinds();
std::string OperatorName(OperatorKind kind);
OperatorKind ParseOperatorKind(const std::string& name);

enum class Target { kHead = 0, kRel = 1, kTail = 2 };
inline constexpr std::array<Target, 3> kTargets = {Target::kHead, Target::kRel,
                                                   Target::kTail};
char TargetLetter(Target t);

enum class FusionMode { kGated, kAdd };
std::string FusionModeName(FusionMode mode);
FusionMode ParseFusionMode(const std::string& name);

// Shape-level settings shared by every module of one model.
struct ModelConfig {
  int64_t num_entities = 0;
  int64_t num_relations = 0;
  int64_t dim = 400;
  int n_layers = 1;
  // 2-D reshape (rows, cols) for the conv2d reconstructors; rows * cols == dim.
  std::optional<std::array<int64_t, 2>> reshape;
  int64_t conv_filters = 32;
  int64_t conv_score_filters = 32;
  int64_t mlp_hidden = 0;  // 0 means "same as dim"
  int p_norm = 1;
  FusionMode fusion = FusionMode::kGated;
  bool per_relation_translation = false;

  int64_t hidden() const { return mlp_hidden > 0 ? mlp_hidden : dim; }
  // Resolved reshape; throws if a conv2d operator needs one and none fits.
  std::array<int64_t, 2> ResolvedReshape() const;
};

// Batched embeddings, each (B, d).
template <typename T>
struct Embeddings {
  Tensor<T> head, rel, tail;
  const Tensor<T>& of(Target t) const;
};

// Parameters of one operator instance on one hyperedge. Unused fields stay
// undefined.
template <typename T>
struct OperatorParams {
  Tensor<T> filters, filter_bias;  // conv kernels
  Tensor<T> proj, proj_bias;       // conv output -> d
  Tensor<T> mat_a, mat_b;          // translation maps; (d, d) or (R, d*d)
};

// Registers the parameters `kind` owns under `prefix`.
template <typename T>
OperatorParams<T> MakeOperatorParams(OperatorKind kind, const ModelConfig& cfg,
                                     const std::string& prefix,
                                     ParameterStore<T>& store, std::mt19937_64& rng);

// Reconstructs the target from the two other embeddings in canonical order
// (h <- (r, t), r <- (h, t), t <- (h, r)). `rels` is only read by per-relation
// translation maps.
template <typename T>
Tensor<T> Reconstruct(Target target, OperatorKind kind, const Embeddings<T>& embs,
                      const OperatorParams<T>& params, const ModelConfig& cfg,
                      const std::vector<int64_t>& rels = {});

// beta = sigmoid([e_orig; e_new] . W + b) per row; beta * e_orig +
// (1 - beta) * e_new. W is (2d, 1), b is (1).
template <typename T>
Tensor<T> Fuse(const Tensor<T>& e_orig, const Tensor<T>& e_new, const Tensor<T>& w,
               const Tensor<T>& b);

// Unweighted mean, the fusion ablation.
template <typename T>
Tensor<T> FuseAdd(const Tensor<T>& e_orig, const Tensor<T>& e_new);

// One searchable representation layer. Each target owns a candidate list;
// a single candidate is the discrete case, several form a mixture.
template <typename T>
class RepresentationLayer {
 public:
  RepresentationLayer(int layer, const ModelConfig& cfg,
                      const std::array<std::vector<OperatorKind>, 3>& candidates,
                      ParameterStore<T>& store, std::mt19937_64& rng);

  // `mix_weights[t]` holds softmax weights when target t has several
  // candidates and is ignored otherwise. All targets read the same input.
  Embeddings<T> Forward(const Embeddings<T>& in,
                        const std::array<Tensor<T>, 3>& mix_weights,
                        const std::vector<int64_t>& rels) const;

  const std::vector<OperatorKind>& candidates(Target t) const {
    return targets_[static_cast<int>(t)].candidates;
  }

 private:
  struct TargetState {
    std::vector<OperatorKind> candidates;
    std::vector<OperatorParams<T>> params;
    Tensor<T> gate_w, gate_b;  // undefined for pure identity or add fusion
  };
  Tensor<T> ForwardTarget(Target t, const Embeddings<T>& in, const Tensor<T>& weights,
                          const std::vector<int64_t>& rels) const;

  ModelConfig cfg_;
  std::array<TargetState, 3> targets_;
};

}  // namespace nase
