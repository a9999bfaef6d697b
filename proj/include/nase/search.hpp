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

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nase/kg_data.hpp"
#include "nase/network.hpp"
#include "nase/optim.hpp"

namespace nase {

enum class AlphaSource { kValid, kTrain };
std::string AlphaSourceName(AlphaSource s);
AlphaSource ParseAlphaSource(const std::string& name);

struct SearchConfig {
  int epochs = 50;
  double lr_theta = 1e-3;
  double lr_alpha = 3e-4;
  int64_t batch_size = 128;
  int64_t n_neg = 10;
  AlphaSource alpha_source = AlphaSource::kValid;
  std::string alpha_optimizer = "adam";
  std::string theta_optimizer = "sgd";
  double l2 = 0;
  uint64_t seed = 0;
};

// Argmax of the softmax per hyperedge; ties go to the lowest candidate index
// and are appended to `ties` (edge names) when given.
Genotype Derive(const ArchWeights& arch, const ModelConfig& cfg,
                std::vector<std::string>* ties = nullptr);

// Alternating first-order update: theta on `train_batch` with alpha frozen,
// then alpha on `alpha_batch` with the updated theta. Returns both losses.
template <typename T>
std::pair<double, double> SearchStep(KgeNetwork<T>& model, Optimizer<T>& theta_opt,
                                     Optimizer<T>& alpha_opt, const Batch& train_batch,
                                     const Batch& alpha_batch);

struct SearchEpoch {
  int epoch = 0;
  double loss_theta = 0;
  double loss_alpha = 0;
  ArchWeights arch;
};

// Per-edge softmax and entropy plus the mean entropy over searchable edges.
nlohmann::json SearchEpochToJson(const SearchEpoch& e);
double MeanSearchableEntropy(const ArchWeights& arch);

struct SearchResult {
  ArchWeights arch;
  std::vector<SearchEpoch> log;
  double initial_mean_entropy = 0;
};

struct SearchOptions {
  std::ostream* log = nullptr;  // JSON-lines
  std::optional<std::filesystem::path> checkpoint;
  // Extra checkpoint metadata (e.g. the resolved run config).
  std::map<std::string, std::string> checkpoint_meta;
};

template <typename T>
SearchResult RunSearch(KgeNetwork<T>& model, const TripleStore& store,
                       const SearchConfig& config, const SearchOptions& options = {});

// Re-derives a genotype from a search checkpoint's stored logits.
Genotype DeriveFromCheckpoint(const std::filesystem::path& path,
                              std::vector<std::string>* ties = nullptr);

}  // namespace nase
