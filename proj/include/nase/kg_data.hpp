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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nase/tensor.hpp"

namespace nase {

struct Triple {
  int64_t head = 0;
  int64_t rel = 0;
  int64_t tail = 0;
  auto operator<=>(const Triple&) const = default;
};

enum class Split { kTrain, kValid, kTest };
std::string SplitName(Split split);

class DataError : public Error {
 public:
  using Error::Error;
};

// Lexicographically ordered string vocabulary.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names);

  int64_t size() const { return static_cast<int64_t>(names_.size()); }
  int64_t IndexOf(const std::string& name) const;
  const std::string& NameOf(int64_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int64_t> index_;
};

// Which slot of a test triple is being predicted.
enum class QuerySide { kHead, kTail };

struct Query {
  Triple triple;
  QuerySide side = QuerySide::kTail;
  int64_t gold() const { return side == QuerySide::kTail ? triple.tail : triple.head; }
};

struct DatasetStats {
  int64_t entities = 0, relations = 0, train = 0, valid = 0, test = 0;
};

// Immutable after construction; safe for concurrent readers.
class TripleStore {
 public:
  TripleStore() = default;
  // Builds a store from index triples. Triples are validated against the
  // vocabulary sizes and deduplicated within each split.
  TripleStore(Vocabulary entities, Vocabulary relations, std::vector<Triple> train,
              std::vector<Triple> valid, std::vector<Triple> test);

  const Vocabulary& entities() const { return entities_; }
  const Vocabulary& relations() const { return relations_; }
  int64_t num_entities() const { return entities_.size(); }
  int64_t num_relations() const { return relations_.size(); }
  const std::vector<Triple>& split(Split s) const;
  int64_t duplicates_dropped() const { return duplicates_dropped_; }

  bool IsKnown(const Triple& t) const { return known_.count(Key(t)) != 0; }
  int64_t KnownCount() const { return static_cast<int64_t>(known_.size()); }

  // Entities whose substitution into the query slot yields an unknown
  // triple, plus the gold entity. Sorted ascending.
  std::vector<int64_t> FilteredCandidates(const Query& query) const;

  DatasetStats Stats() const;

 private:
  uint64_t Key(const Triple& t) const {
    return (static_cast<uint64_t>(t.head) * static_cast<uint64_t>(num_relations()) +
            static_cast<uint64_t>(t.rel)) *
               static_cast<uint64_t>(num_entities()) +
           static_cast<uint64_t>(t.tail);
  }
  uint64_t PairKey(int64_t a, int64_t rel) const {
    return static_cast<uint64_t>(a) * static_cast<uint64_t>(num_relations()) +
           static_cast<uint64_t>(rel);
  }

  Vocabulary entities_, relations_;
  std::vector<Triple> splits_[3];
  std::unordered_set<uint64_t> known_;
  // (head, rel) -> known tails; (tail, rel) -> known heads.
  std::unordered_map<uint64_t, std::vector<int64_t>> tails_of_;
  std::unordered_map<uint64_t, std::vector<int64_t>> heads_of_;
  int64_t duplicates_dropped_ = 0;
};

// Reads train.txt / valid.txt / test.txt (head<TAB>relation<TAB>tail).
TripleStore LoadDataset(const std::filesystem::path& dir);

struct Batch {
  std::vector<int64_t> heads, rels, tails;
  std::vector<double> labels;
  int64_t size() const { return static_cast<int64_t>(labels.size()); }
};

// Replaces head or tail (fair coin) with a uniform entity, retrying up to 50
// times while the corruption is a known triple; the last draw is kept.
Triple CorruptTriple(const TripleStore& store, const Triple& positive,
                     std::mt19937_64& rng);

// Layout: each positive followed by its n_neg corruptions.
Batch MakeBatch(const TripleStore& store, const std::vector<Triple>& positives,
                int64_t n_neg, std::mt19937_64& rng);

// One batch of distinct positives drawn uniformly from the split.
Batch SampleBatch(const TripleStore& store, Split split, int64_t batch_size,
                  int64_t n_neg, std::mt19937_64& rng);

// Epoch-based sampler: every positive is visited once per epoch in a fresh
// random order; the last batch of an epoch may be short.
class BatchSampler {
 public:
  BatchSampler(const TripleStore& store, Split split, int64_t batch_size,
               int64_t n_neg, uint64_t seed);

  Batch Next();
  std::vector<Batch> NextEpoch();
  int64_t BatchesPerEpoch() const;

 private:
  void Reshuffle();

  const TripleStore* store_;
  Split split_;
  int64_t batch_size_, n_neg_;
  std::mt19937_64 rng_;
  std::vector<size_t> order_;
  size_t cursor_ = 0;
};

// Fisher-Yates with the engine's raw output, reproducible across standard
// library implementations.
template <typename It>
void DeterministicShuffle(It first, It last, std::mt19937_64& rng) {
  const auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    const auto j = static_cast<decltype(i)>(rng() % static_cast<uint64_t>(i + 1));
    std::swap(first[i], first[j]);
  }
}

}  // namespace nase
