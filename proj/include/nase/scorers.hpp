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

#include <random>
#include <string>
#include <vector>

#include "nase/optim.hpp"
#include "nase/representation.hpp"

// Triple scorers. Every scorer maps batched (B, d) embeddings to (B) logits,
// higher meaning more plausible.
namespace nase {

enum class ScoreFnKind { kConvScore, kTransE, kDistMult, kSimplE, kMlp };

inline constexpr int kNumScoreFnKinds = 5;
const std::vector<ScoreFnKind>& AllScoreFnKinds();
std::string ScoreFnName(ScoreFnKind kind);
ScoreFnKind ParseScoreFnKind(const std::string& name);

// -||h + r - t||_p
template <typename T>
Tensor<T> ScoreTransE(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t, int p);

// sum_i h_i r_i t_i
template <typename T>
Tensor<T> ScoreDistMult(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t);

// (sum h r t + sum h r' t) / 2 with r' the auxiliary relation rows.
template <typename T>
Tensor<T> ScoreSimplE(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t,
                      const Tensor<T>& aux_rows);

// Stack (B, 1, 3, d); M filters 3x3, valid over the 3 rows and same over d;
// ReLU; flatten to (B, M*d); dot with W (M*d, 1).
template <typename T>
Tensor<T> ScoreConv(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t,
                    const Tensor<T>& filters, const Tensor<T>& filter_bias,
                    const Tensor<T>& w);

// [h; r; t] (3d) -> H -> ReLU -> 1.
template <typename T>
Tensor<T> ScoreMlp(const Tensor<T>& h, const Tensor<T>& r, const Tensor<T>& t,
                   const Tensor<T>& w1, const Tensor<T>& b1, const Tensor<T>& w2,
                   const Tensor<T>& b2);

// Owns the parameters of a set of scorer kinds.
template <typename T>
class ScorerBank {
 public:
  ScorerBank(const ModelConfig& cfg, const std::vector<ScoreFnKind>& kinds,
             ParameterStore<T>& store, std::mt19937_64& rng);

  Tensor<T> Score(ScoreFnKind kind, const Embeddings<T>& embs,
                  const std::vector<int64_t>& rels) const;
  const std::vector<ScoreFnKind>& kinds() const { return kinds_; }

 private:
  ModelConfig cfg_;
  std::vector<ScoreFnKind> kinds_;
  Tensor<T> conv_filters_, conv_bias_, conv_w_;
  Tensor<T> simple_aux_;
  Tensor<T> mlp_w1_, mlp_b1_, mlp_w2_, mlp_b2_;
};

}  // namespace nase
