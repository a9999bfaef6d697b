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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nase/tensor.hpp"

namespace nase {

enum class Pattern { kSymmetric, kCompositional, kNoise };
std::string PatternName(Pattern p);

// "symmetric=2,compositional=1,noise=1": relative shares of relations.
std::map<Pattern, double> ParsePatternMix(const std::string& text);

struct SynthConfig {
  int64_t n_entities = 200;
  int64_t n_relations = 6;
  std::map<Pattern, double> mix = {{Pattern::kSymmetric, 1.0}, {Pattern::kCompositional, 1.0}};
  uint64_t seed = 1;
  int64_t edges_per_relation = 150;
};

struct NamedTriple {
  std::string head, rel, tail;
};

struct SynthDataset {
  std::vector<std::string> entities;
  // Relation name and the pattern it was generated from.
  std::vector<std::pair<std::string, Pattern>> relations;
  std::vector<NamedTriple> train, valid, test;
};

// Number of relations assigned to each pattern. Compositional relations come
// in triples (r1, r2, r1 o r2). Throws when the shares cannot be met.
std::map<Pattern, int64_t> AllocateRelations(const std::map<Pattern, double>& mix,
                                             int64_t n_relations);

// Splits 80/10/10 per relation. Held-out triples of a composed relation are
// only taken from those with both path edges in train.
SynthDataset GenerateSynthetic(const SynthConfig& config);

void WriteSynthetic(const SynthDataset& data, const std::filesystem::path& dir);

}  // namespace nase
