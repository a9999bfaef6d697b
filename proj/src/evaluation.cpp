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

#include "nase/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

namespace nase {

std::string TiePolicyName(TiePolicy p) {
  switch (p) {
    case TiePolicy::kMean: return "mean";
    case TiePolicy::kOptimistic: return "optimistic";
    case TiePolicy::kPessimistic: return "pessimistic";
  }
  return "?";
}

TiePolicy ParseTiePolicy(const std::string& name) {
  if (name == "mean") return TiePolicy::kMean;
  if (name == "optimistic") return TiePolicy::kOptimistic;
  if (name == "pessimistic") return TiePolicy::kPessimistic;
  throw Error("unknown tie policy '" + name + "' (expected mean|optimistic|pessimistic)");
}

std::string ProtocolName(Protocol p) { return p == Protocol::kRaw ? "raw" : "filtered"; }

Protocol ParseProtocol(const std::string& name) {
  if (name == "raw") return Protocol::kRaw;
  if (name == "filtered") return Protocol::kFiltered;
  throw Error("unknown protocol '" + name + "' (expected raw|filtered)");
}

double RankOf(std::span<const double> scores, size_t gold, TiePolicy policy) {
  if (gold >= scores.size()) throw Error("rank_of: gold index out of range");
  const double g = scores[gold];
  int64_t greater = 0, ties = 0;
  for (double s : scores) {
    greater += s > g;
    ties += s == g;
  }
  double adjust = 0;
  switch (policy) {
    case TiePolicy::kMean: adjust = static_cast<double>(ties - 1) / 2.0; break;
    case TiePolicy::kOptimistic: adjust = 0; break;
    case TiePolicy::kPessimistic: adjust = static_cast<double>(ties - 1); break;
  }
  return 1.0 + static_cast<double>(greater) + adjust;
}

Metrics AggregateRanks(const std::vector<double>& ranks, const std::vector<int>& ks,
                       Protocol protocol) {
  if (ranks.empty()) throw Error("evaluate: no queries");
  Metrics m;
  m.protocol = protocol;
  m.n_queries = static_cast<int64_t>(ranks.size());
  double sum = 0, rsum = 0;
  for (double r : ranks) {
    sum += r;
    rsum += 1.0 / r;
  }
  m.mr = sum / static_cast<double>(ranks.size());
  m.mrr = rsum / static_cast<double>(ranks.size());
  for (int k : ks) {
    const auto hit = std::count_if(ranks.begin(), ranks.end(),
                                   [k](double r) { return r <= static_cast<double>(k); });
    m.hits[k] = static_cast<double>(hit) / static_cast<double>(ranks.size());
  }
  return m;
}

nlohmann::json MetricsToJson(const Metrics& m) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [k, v] : m.hits) hits[std::to_string(k)] = v;
  return {{"mr", m.mr},
          {"mrr", m.mrr},
          {"hits", hits},
          {"n_queries", m.n_queries},
          {"protocol", ProtocolName(m.protocol)}};
}

std::string MetricsTable(const Metrics& m) {
  std::ostringstream os;
  os << fmt::format("{:<10}{:>12}\n", "metric", "value");
  os << fmt::format("{:<10}{:>12.4f}\n", "MR", m.mr);
  os << fmt::format("{:<10}{:>12.4f}\n", "MRR", m.mrr);
  for (const auto& [k, v] : m.hits) {
    os << fmt::format("{:<10}{:>12.4f}\n", "Hits@" + std::to_string(k), v);
  }
  os << fmt::format("{:<10}{:>12}\n", "queries", m.n_queries);
  os << fmt::format("{:<10}{:>12}\n", "protocol", ProtocolName(m.protocol));
  return os.str();
}

template <typename T>
TripleScorer MakeNetworkScorer(const KgeNetwork<T>& model) {
  return [&model](const std::vector<int64_t>& h, const std::vector<int64_t>& r,
                  const std::vector<int64_t>& t) {
    const auto out = model.Forward(h, r, t);
    return std::vector<double>(out.data().begin(), out.data().end());
  };
}

std::vector<double> QueryRanks(const TripleScorer& scorer, const TripleStore& store,
                               const EvalOptions& options) {
  const auto& triples = store.split(options.split);
  if (triples.empty()) throw DataError("evaluate: " + SplitName(options.split) + " split is empty");
  const int64_t n_queries = 2 * static_cast<int64_t>(triples.size());
  std::vector<double> ranks(n_queries);
  std::vector<int64_t> all(store.num_entities());
  std::iota(all.begin(), all.end(), int64_t{0});

  auto run_query = [&](int64_t q) {
    Query query{triples[q / 2], q % 2 == 0 ? QuerySide::kTail : QuerySide::kHead};
    const std::vector<int64_t> cands = options.protocol == Protocol::kFiltered
                                           ? store.FilteredCandidates(query)
                                           : all;
    const size_t n = cands.size();
    std::vector<int64_t> h(n, query.triple.head), r(n, query.triple.rel),
        t(n, query.triple.tail);
    auto& slot = query.side == QuerySide::kTail ? t : h;
    size_t gold = n;
    for (size_t i = 0; i < n; ++i) {
      slot[i] = cands[i];
      if (cands[i] == query.gold()) gold = i;
    }
    const auto scores = scorer(h, r, t);
    ranks[q] = RankOf(scores, gold, options.tie_policy);
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (int64_t q = 0; q < n_queries; ++q) run_query(q);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int64_t q = w; q < n_queries; q += threads) run_query(q);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return ranks;
}

Metrics Evaluate(const TripleScorer& scorer, const TripleStore& store,
                 const EvalOptions& options) {
  return AggregateRanks(QueryRanks(scorer, store, options), options.ks, options.protocol);
}

template TripleScorer MakeNetworkScorer(const KgeNetwork<float>&);
template TripleScorer MakeNetworkScorer(const KgeNetwork<double>&);

}  // namespace nase
