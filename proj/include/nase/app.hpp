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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nase/config.hpp"
#include "nase/synth.hpp"

namespace nase {

// Artifact names inside out_dir.
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kStatsFile = "dataset_stats.json";
inline constexpr const char* kSearchLogFile = "search.log.jsonl";
inline constexpr const char* kSearchCheckpointFile = "search.ckpt";
inline constexpr const char* kGenotypeFile = "genotype.json";
inline constexpr const char* kFitLogFile = "fit.log.jsonl";
inline constexpr const char* kModelFile = "model.ckpt";

nlohmann::json StatsToJson(const DatasetStats& s, int64_t duplicates_dropped);

Genotype ReadGenotype(const std::filesystem::path& path);
void WriteGenotype(const Genotype& g, const std::filesystem::path& path);

// Search, then derive; writes the resolved config, dataset stats, search log,
// search checkpoint and genotype into out_dir.
nlohmann::json CmdSearch(const RunConfig& config);

// Trains the genotype from scratch; writes the fit log and model checkpoint.
nlohmann::json CmdTrain(const RunConfig& config, const std::filesystem::path& genotype);

nlohmann::json CmdEval(const std::filesystem::path& model, const std::filesystem::path& dataset,
                       const EvalOptions& options);

Genotype CmdDerive(const std::filesystem::path& checkpoint,
                   const std::optional<std::filesystem::path>& out);

nlohmann::json CmdSynth(const SynthConfig& config, const std::filesystem::path& out_dir);

nlohmann::json CmdStats(const std::filesystem::path& dataset);

struct GridSpec {
  std::vector<int> n_layers = {1, 2, 3, 4};
  std::vector<int64_t> dims = {100, 200, 400};
  std::vector<double> lrs = {1e-2, 1e-3, 1e-4};
  std::vector<int64_t> batch_sizes = {128, 256};
};

// Sequential search + train over every grid point, each in its own
// subdirectory of out_dir; one record per point in grid.jsonl. Points without
// a fitting reshape use the most square factorization of dim.
nlohmann::json CmdGrid(const RunConfig& base, const GridSpec& grid);

}  // namespace nase
