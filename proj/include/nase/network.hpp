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
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nase/optim.hpp"
#include "nase/representation.hpp"
#include "nase/scorers.hpp"

namespace nase {

inline constexpr const char* kGenotypeFormat = "nase-genotype-v1";

// A discrete architecture plus the shape settings needed to rebuild it.
struct Genotype {
  int n_layers = 1;
  std::vector<std::array<std::string, 3>> rep_choices;  // per layer: h, r, t
  std::string score_choice = "transe";
  int64_t dim = 400;
  std::optional<std::array<int64_t, 2>> reshape;
  int64_t conv_filters = 32;
  int64_t conv_score_filters = 32;
  int64_t mlp_hidden = 0;

  void Validate() const;
  bool operator==(const Genotype&) const = default;
};

nlohmann::json GenotypeToJson(const Genotype& g);
Genotype GenotypeFromJson(const nlohmann::json& j);

nlohmann::json ModelConfigToJson(const ModelConfig& cfg);
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

// Candidate operators per hyperedge. One candidate means the edge is fixed.
struct SearchSpace {
  std::vector<std::array<std::vector<OperatorKind>, 3>> rep;  // per layer
  std::vector<ScoreFnKind> score;

  int n_layers() const { return static_cast<int>(rep.size()); }
  static SearchSpace Full(int n_layers);
  static SearchSpace FromGenotype(const Genotype& g);
  bool IsDiscrete() const;
};

nlohmann::json SearchSpaceToJson(const SearchSpace& s);
SearchSpace SearchSpaceFromJson(const nlohmann::json& j);

// Architecture logits of every hyperedge, detached from any model. Fixed
// edges carry a single zero logit.
struct HyperedgeWeights {
  std::string name;
  std::vector<std::string> candidates;
  std::vector<double> alpha;
};

struct ArchWeights {
  std::vector<HyperedgeWeights> rep;  // layer-major, then h, r, t
  HyperedgeWeights score;

  int n_layers() const { return static_cast<int>(rep.size() / 3); }
};

std::string RepEdgeName(int layer, Target t);
inline constexpr const char* kScoreEdgeName = "score";
// Parameter name holding an edge's logits.
std::string AlphaParamName(const std::string& edge);

// Embedding tables, representation layers, and scorers for one search space.
// Mutated only through its parameter store by a single worker; Forward on
// frozen parameters may run concurrently.
template <typename T>
class KgeNetwork {
 public:
  KgeNetwork(const ModelConfig& cfg, const SearchSpace& space, uint64_t seed);

  // Logits (B) for index triples.
  Tensor<T> Forward(const std::vector<int64_t>& heads, const std::vector<int64_t>& rels,
                    const std::vector<int64_t>& tails) const;

  // Refined embeddings after all representation layers.
  Embeddings<T> Refine(const std::vector<int64_t>& heads, const std::vector<int64_t>& rels,
                       const std::vector<int64_t>& tails) const;

  ParameterStore<T>& params() { return store_; }
  const ParameterStore<T>& params() const { return store_; }
  const ModelConfig& config() const { return cfg_; }
  const SearchSpace& space() const { return space_; }
  const RepresentationLayer<T>& layer(int l) const { return *layers_[l]; }
  const ScorerBank<T>& scorers() const { return *scorers_; }
  Tensor<T> entity_table() const { return entities_; }
  Tensor<T> relation_table() const { return relations_; }

  ArchWeights Arch() const;

 private:
  Tensor<T> MixWeights(const std::string& edge) const;

  ModelConfig cfg_;
  SearchSpace space_;
  ParameterStore<T> store_;
  Tensor<T> entities_, relations_;
  std::vector<std::unique_ptr<RepresentationLayer<T>>> layers_;
  std::unique_ptr<ScorerBank<T>> scorers_;
};

std::vector<double> SoftmaxValues(const std::vector<double>& logits);
double Entropy(const std::vector<double>& probs);

}  // namespace nase
