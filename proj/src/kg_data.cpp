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

#include "nase/kg_data.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <set>

namespace nase {

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

Vocabulary::Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<int64_t>(i)).second) {
      throw DataError("duplicate vocabulary entry '" + names_[i] + "'");
    }
  }
}

int64_t Vocabulary::IndexOf(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown token '" + name + "'");
  return it->second;
}

TripleStore::TripleStore(Vocabulary entities, Vocabulary relations,
                         std::vector<Triple> train, std::vector<Triple> valid,
                         std::vector<Triple> test)
    : entities_(std::move(entities)), relations_(std::move(relations)) {
  std::vector<Triple>* inputs[3] = {&train, &valid, &test};
  for (int s = 0; s < 3; ++s) {
    std::set<Triple> seen;
    for (const Triple& t : *inputs[s]) {
      if (t.head < 0 || t.head >= num_entities() || t.tail < 0 ||
          t.tail >= num_entities() || t.rel < 0 || t.rel >= num_relations()) {
        throw DataError("triple index out of range in split " +
                        SplitName(static_cast<Split>(s)));
      }
      if (!seen.insert(t).second) {
        ++duplicates_dropped_;
        continue;
      }
      splits_[s].push_back(t);
    }
  }
  for (const auto& split : splits_) {
    for (const Triple& t : split) {
      if (known_.insert(Key(t)).second) {
        tails_of_[PairKey(t.head, t.rel)].push_back(t.tail);
        heads_of_[PairKey(t.tail, t.rel)].push_back(t.head);
      }
    }
  }
}

const std::vector<Triple>& TripleStore::split(Split s) const {
  return splits_[static_cast<int>(s)];
}

std::vector<int64_t> TripleStore::FilteredCandidates(const Query& query) const {
  const Triple& t = query.triple;
  const auto& index = query.side == QuerySide::kTail ? tails_of_ : heads_of_;
  const uint64_t key = query.side == QuerySide::kTail ? PairKey(t.head, t.rel)
                                                      : PairKey(t.tail, t.rel);
  std::vector<char> excluded(num_entities(), 0);
  if (auto it = index.find(key); it != index.end()) {
    for (int64_t e : it->second) excluded[e] = 1;
  }
  excluded[query.gold()] = 0;
  std::vector<int64_t> out;
  out.reserve(num_entities());
  for (int64_t e = 0; e < num_entities(); ++e) {
    if (!excluded[e]) out.push_back(e);
  }
  return out;
}

DatasetStats TripleStore::Stats() const {
  return {num_entities(), num_relations(),
          static_cast<int64_t>(split(Split::kTrain).size()),
          static_cast<int64_t>(split(Split::kValid).size()),
          static_cast<int64_t>(split(Split::kTest).size())};
}

namespace {

struct RawTriple {
  std::string head, rel, tail;
};

std::vector<RawTriple> ReadTripleFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file " + path.string());
  std::vector<RawTriple> out;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 3> fields;
    size_t start = 0;
    int count = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      const std::string field =
          line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
      if (count < 3) fields[count] = field;
      ++count;
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (count != 3) {
      throw DataError(where + ": expected 3 tab-separated fields, got " +
                      std::to_string(count));
    }
    for (const auto& f : fields) {
      if (f.empty()) throw DataError(where + ": empty entity or relation token");
    }
    out.push_back({fields[0], fields[1], fields[2]});
  }
  return out;
}

}  // namespace

TripleStore LoadDataset(const std::filesystem::path& dir) {
  const char* files[3] = {"train.txt", "valid.txt", "test.txt"};
  std::vector<RawTriple> raw[3];
  for (int s = 0; s < 3; ++s) raw[s] = ReadTripleFile(dir / files[s]);

  std::set<std::string> entity_names, relation_names;
  for (const auto& split : raw) {
    for (const auto& r : split) {
      entity_names.insert(r.head);
      entity_names.insert(r.tail);
      relation_names.insert(r.rel);
    }
  }
  Vocabulary entities({entity_names.begin(), entity_names.end()});
  Vocabulary relations({relation_names.begin(), relation_names.end()});

  std::vector<Triple> splits[3];
  for (int s = 0; s < 3; ++s) {
    splits[s].reserve(raw[s].size());
    for (const auto& r : raw[s]) {
      splits[s].push_back(
          {entities.IndexOf(r.head), relations.IndexOf(r.rel), entities.IndexOf(r.tail)});
    }
  }
  TripleStore store(std::move(entities), std::move(relations), std::move(splits[0]),
                    std::move(splits[1]), std::move(splits[2]));
  if (store.duplicates_dropped() > 0) {
    spdlog::warn("{}: dropped {} duplicate triple(s)", dir.string(),
                 store.duplicates_dropped());
  }
  return store;
}

Triple CorruptTriple(const TripleStore& store, const Triple& positive,
                     std::mt19937_64& rng) {
  const auto n = static_cast<uint64_t>(store.num_entities());
  Triple t = positive;
  for (int attempt = 0; attempt < 50; ++attempt) {
    t = positive;
    const bool replace_head = (rng() & 1ULL) != 0;
    const auto e = static_cast<int64_t>(rng() % n);
    if (replace_head) {
      t.head = e;
    } else {
      t.tail = e;
    }
    if (!store.IsKnown(t)) break;
  }
  return t;
}

Batch MakeBatch(const TripleStore& store, const std::vector<Triple>& positives,
                int64_t n_neg, std::mt19937_64& rng) {
  if (n_neg < 1) throw DataError("n_neg must be >= 1");
  Batch b;
  const size_t total = positives.size() * static_cast<size_t>(1 + n_neg);
  b.heads.reserve(total);
  b.rels.reserve(total);
  b.tails.reserve(total);
  b.labels.reserve(total);
  auto push = [&](const Triple& t, double label) {
    b.heads.push_back(t.head);
    b.rels.push_back(t.rel);
    b.tails.push_back(t.tail);
    b.labels.push_back(label);
  };
  for (const Triple& p : positives) {
    push(p, 1.0);
    for (int64_t k = 0; k < n_neg; ++k) push(CorruptTriple(store, p, rng), 0.0);
  }
  return b;
}

Batch SampleBatch(const TripleStore& store, Split split, int64_t batch_size,
                  int64_t n_neg, std::mt19937_64& rng) {
  const auto& pool = store.split(split);
  if (pool.empty()) throw DataError(SplitName(split) + " split is empty");
  if (batch_size < 1 || batch_size > static_cast<int64_t>(pool.size())) {
    throw DataError("batch size " + std::to_string(batch_size) + " exceeds " +
                    SplitName(split) + " split size " + std::to_string(pool.size()));
  }
  std::vector<size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  // Partial Fisher-Yates: the first batch_size slots are a uniform draw.
  for (int64_t i = 0; i < batch_size; ++i) {
    const auto j = i + static_cast<int64_t>(rng() % (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<Triple> positives;
  for (int64_t i = 0; i < batch_size; ++i) positives.push_back(pool[idx[i]]);
  return MakeBatch(store, positives, n_neg, rng);
}

BatchSampler::BatchSampler(const TripleStore& store, Split split,
                           int64_t batch_size, int64_t n_neg, uint64_t seed)
    : store_(&store), split_(split), batch_size_(batch_size), n_neg_(n_neg), rng_(seed) {
  const auto& pool = store.split(split);
  if (pool.empty()) throw DataError(SplitName(split) + " split is empty");
  if (batch_size < 1 || batch_size > static_cast<int64_t>(pool.size())) {
    throw DataError("batch size " + std::to_string(batch_size) + " exceeds " +
                    SplitName(split) + " split size " + std::to_string(pool.size()));
  }
  if (n_neg < 1) throw DataError("n_neg must be >= 1");
  order_.resize(pool.size());
  std::iota(order_.begin(), order_.end(), size_t{0});
  Reshuffle();
}

void BatchSampler::Reshuffle() {
  DeterministicShuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

int64_t BatchSampler::BatchesPerEpoch() const {
  const auto n = static_cast<int64_t>(order_.size());
  return (n + batch_size_ - 1) / batch_size_;
}

Batch BatchSampler::Next() {
  if (cursor_ >= order_.size()) Reshuffle();
  const auto& pool = store_->split(split_);
  const size_t end = std::min(order_.size(), cursor_ + static_cast<size_t>(batch_size_));
  std::vector<Triple> positives;
  positives.reserve(end - cursor_);
  for (size_t i = cursor_; i < end; ++i) positives.push_back(pool[order_[i]]);
  cursor_ = end;
  return MakeBatch(*store_, positives, n_neg_, rng_);
}

std::vector<Batch> BatchSampler::NextEpoch() {
  if (cursor_ != 0 && cursor_ < order_.size()) {
    throw DataError("NextEpoch called mid-epoch");
  }
  std::vector<Batch> out;
  const int64_t n = BatchesPerEpoch();
  for (int64_t i = 0; i < n; ++i) out.push_back(Next());
  return out;
}

}  // namespace nase
