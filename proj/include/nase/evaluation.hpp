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

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nase/kg_data.hpp"
#include "nase/network.hpp"

namespace nase {

enum class TiePolicy { kMean, kOptimistic, kPessimistic };
enum class Protocol { kRaw, kFiltered };

std::string TiePolicyName(TiePolicy p);
TiePolicy ParseTiePolicy(const std::string& name);
std::string ProtocolName(Protocol p);
Protocol ParseProtocol(const std::string& name);

// 1 + #{score > gold} + tie adjustment, where ties counts candidates whose
// score equals the gold score, gold included.
double RankOf(std::span<const double> scores, size_t gold, TiePolicy policy);

struct Metrics {
  double mr = 0;
  double mrr = 0;
  std::map<int, double> hits;
  int64_t n_queries = 0;
  Protocol protocol = Protocol::kFiltered;
};

Metrics AggregateRanks(const std::vector<double>& ranks, const std::vector<int>& ks,
                       Protocol protocol);

nlohmann::json MetricsToJson(const Metrics& m);
std::string MetricsTable(const Metrics& m);

// Scores index triples of equal length; must be safe to call concurrently.
using TripleScorer = std::function<std::vector<double>(
    const std::vector<int64_t>& heads, const std::vector<int64_t>& rels,
    const std::vector<int64_t>& tails)>;

template <typename T>
TripleScorer MakeNetworkScorer(const KgeNetwork<T>& model);

struct EvalOptions {
  Protocol protocol = Protocol::kFiltered;
  TiePolicy tie_policy = TiePolicy::kMean;
  std::vector<int> ks = {1, 3, 10};
  Split split = Split::kTest;
  int threads = 1;
};

// Per-query ranks in query order: for each triple of the split, the tail
// query (h, r, ?) then the head query (?, r, t).
std::vector<double> QueryRanks(const TripleScorer& scorer, const TripleStore& store,
                               const EvalOptions& options);

Metrics Evaluate(const TripleScorer& scorer, const TripleStore& store,
                 const EvalOptions& options);

}  // namespace nase
