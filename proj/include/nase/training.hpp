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
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nase/evaluation.hpp"
#include "nase/kg_data.hpp"
#include "nase/network.hpp"

namespace nase {

class NonFiniteLossError : public Error {
 public:
  using Error::Error;
};

// Mean binary cross-entropy of sigmoid(score) against 0/1 labels, computed
// from the logits directly.
template <typename T>
Tensor<T> BceLoss(const Tensor<T>& scores, const std::vector<double>& labels);

struct TrainConfig {
  int64_t dim = 400;
  int n_layers = 1;
  double lr = 1e-3;
  int64_t batch_size = 128;
  int64_t n_neg = 10;
  int epochs = 100;
  uint64_t seed = 0;
  int p_norm = 1;
  Precision precision = Precision::kF32;
  // Epochs without validation MRR improvement before stopping; 0 disables.
  int patience = 10;
  int valid_every = 1;
  double l2 = 0;
  std::string optimizer = "sgd";
  TiePolicy tie_policy = TiePolicy::kMean;
  int threads = 1;
  bool log_wall_time = true;

  void Validate() const;
};

struct FitEpoch {
  int epoch = 0;
  double train_loss = 0;
  std::optional<double> valid_mrr;
  double wall_time = 0;
};

nlohmann::json FitEpochToJson(const FitEpoch& e, bool with_wall_time);

template <typename T>
struct FitResult {
  std::unique_ptr<KgeNetwork<T>> model;
  std::vector<FitEpoch> log;
  std::optional<double> best_valid_mrr;
  int best_epoch = 0;
};

// Model settings not carried by a genotype.
struct ModelExtras {
  FusionMode fusion = FusionMode::kGated;
  bool per_relation_translation = false;
};

ModelConfig ModelConfigForGenotype(const Genotype& g, const TripleStore& store,
                                   int p_norm, const ModelExtras& extras);

struct FitOptions {
  std::ostream* log = nullptr;  // JSON-lines, one record per epoch
  std::optional<std::filesystem::path> checkpoint;
};

// Trains the genotype from a fresh initialization; only the chosen operators
// and scorer are allocated. The returned model holds the best-validation
// parameters.
template <typename T>
FitResult<T> Fit(const Genotype& genotype, const TripleStore& store,
                 const TrainConfig& config, const ModelExtras& extras = {},
                 const FitOptions& options = {});

// Checkpoint with the genotype and model config embedded as metadata.
template <typename T>
void SaveModel(const std::filesystem::path& path, const KgeNetwork<T>& model,
               const Genotype& genotype);

struct LoadedModelInfo {
  Genotype genotype;
  ModelConfig model;
  Precision precision;
};

LoadedModelInfo ReadModelInfo(const std::filesystem::path& path);

template <typename T>
std::unique_ptr<KgeNetwork<T>> LoadModel(const std::filesystem::path& path);

}  // namespace nase
