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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nase/evaluation.hpp"
#include "nase/search.hpp"
#include "nase/training.hpp"

namespace nase {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string dataset_dir;
  std::string out_dir;
  uint64_t seed = 0;

  int64_t dim = 400;
  int n_layers = 1;
  std::optional<std::array<int64_t, 2>> reshape;
  double lr = 1e-3;
  int64_t batch_size = 128;
  int64_t n_neg = 10;
  int epochs = 100;
  int patience = 10;
  int valid_every = 1;
  double l2 = 0;
  std::string optimizer = "sgd";
  int p_norm = 1;
  Precision precision = Precision::kF32;

  int epochs_search = 50;
  double lr_alpha = 3e-4;
  AlphaSource alpha_source = AlphaSource::kValid;
  std::string alpha_optimizer = "adam";

  int64_t conv_filters = 32;
  int64_t conv_score_filters = 32;
  int64_t mlp_hidden = 0;

  TiePolicy tie_policy = TiePolicy::kMean;
  Protocol protocol = Protocol::kFiltered;
  std::vector<int> hits = {1, 3, 10};

  bool disable_rep_search = false;
  bool disable_score_search = false;
  std::string fixed_score_fn = "transe";
  FusionMode fusion_mode = FusionMode::kGated;
  bool per_relation_translation = false;

  int threads = 1;
  bool log_wall_time = true;

  void Validate() const;

  TrainConfig Train() const;
  SearchConfig Search() const;
  ModelExtras Extras() const;
  SearchSpace Space() const;
  ModelConfig SearchModel(int64_t num_entities, int64_t num_relations) const;

  bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& RunConfigKeys();

nlohmann::json RunConfigToJson(const RunConfig& cfg);

// Applies the keys of `j` on top of `base`. Unknown keys and ill-typed values
// throw ConfigError.
RunConfig RunConfigFromJson(const nlohmann::json& j, RunConfig base = {});

// Reads a JSON config file, applies `overrides`, then NASE_SEED when set.
// Explicit seed overrides win over the environment.
RunConfig ResolveRunConfig(const std::optional<std::filesystem::path>& file,
                           const nlohmann::json& overrides);

// Most square rows x cols factorization of d (rows <= cols).
std::array<int64_t, 2> SquarestReshape(int64_t d);

}  // namespace nase
