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

#include "nase/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "nase/kg_data.hpp"

namespace nase {

std::string PatternName(Pattern p) {
  switch (p) {
    case Pattern::kSymmetric: return "symmetric";
    case Pattern::kCompositional: return "compositional";
    case Pattern::kNoise: return "noise";
  }
  return "?";
}

std::map<Pattern, double> ParsePatternMix(const std::string& text) {
  std::map<Pattern, double> mix;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("pattern mix entry '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    Pattern p;
    if (key == "symmetric") {
      p = Pattern::kSymmetric;
    } else if (key == "compositional") {
      p = Pattern::kCompositional;
    } else if (key == "noise") {
      p = Pattern::kNoise;
    } else {
      throw Error("unknown pattern '" + key + "' (expected symmetric|compositional|noise)");
    }
    double w = 0;
    try {
      size_t used = 0;
      w = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("pattern mix weight for '" + key + "' is not a number");
    }
    if (!(w >= 0) || !std::isfinite(w)) throw Error("pattern mix weight for '" + key + "' must be >= 0");
    if (mix.count(p)) throw Error("pattern '" + key + "' given twice");
    mix[p] = w;
  }
  return mix;
}

std::map<Pattern, int64_t> AllocateRelations(const std::map<Pattern, double>& mix,
                                             int64_t n_relations) {
  double total = 0;
  for (const auto& [p, w] : mix) total += w;
  if (total <= 0) throw Error("infeasible pattern mix: all weights are zero");

  std::map<Pattern, int64_t> out;
  int64_t comp = 0;
  if (auto it = mix.find(Pattern::kCompositional); it != mix.end() && it->second > 0) {
    const double share = it->second / total * static_cast<double>(n_relations);
    comp = 3 * std::max<int64_t>(1, std::llround(share / 3.0));
  }
  std::vector<std::pair<Pattern, double>> rest;
  double rest_total = 0;
  for (const auto& [p, w] : mix) {
    if (p != Pattern::kCompositional && w > 0) {
      rest.emplace_back(p, w);
      rest_total += w;
    }
  }
  int64_t remaining = n_relations - comp;
  if (remaining < static_cast<int64_t>(rest.size()) || (rest.empty() && remaining != 0)) {
    throw Error(fmt::format(
        "infeasible pattern mix for {} relations: compositional needs groups of 3 and every "
        "weighted pattern needs at least one relation",
        n_relations));
  }
  if (comp > 0) out[Pattern::kCompositional] = comp;
  // Largest remainder, with one relation reserved per pattern.
  std::vector<std::pair<double, Pattern>> remainders;
  int64_t assigned = 0;
  const int64_t free = remaining - static_cast<int64_t>(rest.size());
  for (const auto& [p, w] : rest) {
    const double exact = w / rest_total * static_cast<double>(free);
    const auto base = static_cast<int64_t>(std::floor(exact));
    out[p] = 1 + base;
    assigned += base;
    remainders.emplace_back(exact - static_cast<double>(base), p);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t i = 0; assigned < free; ++i, ++assigned) ++out[remainders[i].second];
  return out;
}

namespace {

using Edge = std::pair<int64_t, int64_t>;

class Generator {
 public:
  Generator(const SynthConfig& cfg, SynthDataset* data)
      : cfg_(cfg), data_(data), rng_(cfg.seed) {}

  int64_t Uniform(int64_t n) { return static_cast<int64_t>(rng_() % static_cast<uint64_t>(n)); }

  int64_t OtherThan(int64_t a) {
    int64_t b = Uniform(cfg_.n_entities - 1);
    return b >= a ? b + 1 : b;
  }

  std::vector<Edge> RandomEdges(int64_t count) {
    std::set<Edge> seen;
    std::vector<Edge> out;
    for (int64_t tries = 0; static_cast<int64_t>(out.size()) < count && tries < 100 * count;
         ++tries) {
      const int64_t a = Uniform(cfg_.n_entities);
      const Edge e{a, OtherThan(a)};
      if (seen.insert(e).second) out.push_back(e);
    }
    return out;
  }

  void Emit(const std::string& rel, const std::vector<Edge>& edges, std::vector<NamedTriple>* dst) {
    for (const auto& [a, b] : edges) dst->push_back({data_->entities[a], rel, data_->entities[b]});
  }

  // Held-out counts for a relation of n triples.
  static std::pair<int64_t, int64_t> HeldOut(int64_t n) {
    const auto k = static_cast<int64_t>(std::llround(0.1 * static_cast<double>(n)));
    return {k, k};
  }

  void SplitPlain(const std::string& rel, std::vector<Edge> edges) {
    DeterministicShuffle(edges.begin(), edges.end(), rng_);
    const auto [nv, nt] = HeldOut(static_cast<int64_t>(edges.size()));
    Emit(rel, {edges.begin(), edges.begin() + nv}, &data_->valid);
    Emit(rel, {edges.begin() + nv, edges.begin() + nv + nt}, &data_->test);
    Emit(rel, {edges.begin() + nv + nt, edges.end()}, &data_->train);
  }

  void Symmetric(const std::string& rel) {
    std::set<Edge> seen;
    std::vector<Edge> pairs;
    const int64_t want = cfg_.edges_per_relation / 2;
    for (int64_t tries = 0; static_cast<int64_t>(pairs.size()) < want && tries < 100 * want;
         ++tries) {
      const int64_t a = Uniform(cfg_.n_entities);
      const int64_t b = OtherThan(a);
      if (seen.insert({std::min(a, b), std::max(a, b)}).second) pairs.push_back({a, b});
    }
    // A held-out triple keeps its reverse in train.
    const auto [nv, nt] = HeldOut(2 * static_cast<int64_t>(pairs.size()));
    std::vector<Edge> train;
    for (size_t i = 0; i < pairs.size(); ++i) {
      const auto [a, b] = pairs[i];
      const auto idx = static_cast<int64_t>(i);
      if (idx < nv + nt) {
        Emit(rel, {{a, b}}, idx < nv ? &data_->valid : &data_->test);
      } else {
        train.push_back({a, b});
      }
      train.push_back({b, a});
    }
    Emit(rel, train, &data_->train);
  }

  void Compositional(const std::string& r1, const std::string& r2, const std::string& r3) {
    std::vector<int64_t> heads(cfg_.n_entities);
    for (int64_t i = 0; i < cfg_.n_entities; ++i) heads[i] = i;
    DeterministicShuffle(heads.begin(), heads.end(), rng_);
    heads.resize(std::min<int64_t>(cfg_.edges_per_relation, cfg_.n_entities));

    std::map<int64_t, int64_t> f1, f2;
    std::vector<Edge> e1, e2, e3;
    for (int64_t a : heads) {
      f1[a] = OtherThan(a);
      e1.push_back({a, f1[a]});
    }
    for (const auto& [a, b] : e1) {
      if (!f2.count(b)) {
        f2[b] = OtherThan(b);
        e2.push_back({b, f2[b]});
      }
    }
    for (const auto& [a, b] : e1) {
      if (f2[b] != a) e3.push_back({a, f2[b]});
    }
    SplitPlain(r1, e1);
    SplitPlain(r2, e2);

    // Edges of r1 and r2 that landed in train, by name.
    std::set<std::pair<std::string, std::string>> train1, train2;
    for (const auto& t : data_->train) {
      if (t.rel == r1) train1.insert({t.head, t.tail});
      if (t.rel == r2) train2.insert({t.head, t.tail});
    }
    std::vector<Edge> supported, unsupported;
    for (const auto& [a, c] : e3) {
      const int64_t b = f1[a];
      const auto& na = data_->entities[a];
      const auto& nb = data_->entities[b];
      const auto& nc = data_->entities[c];
      (train1.count({na, nb}) && train2.count({nb, nc}) ? supported : unsupported).push_back({a, c});
    }
    DeterministicShuffle(supported.begin(), supported.end(), rng_);
    auto [nv, nt] = HeldOut(static_cast<int64_t>(e3.size()));
    const auto avail = static_cast<int64_t>(supported.size());
    nv = std::min(nv, avail / 2);
    nt = std::min(nt, avail - nv);
    Emit(r3, {supported.begin(), supported.begin() + nv}, &data_->valid);
    Emit(r3, {supported.begin() + nv, supported.begin() + nv + nt}, &data_->test);
    Emit(r3, {supported.begin() + nv + nt, supported.end()}, &data_->train);
    Emit(r3, unsupported, &data_->train);
  }

  void Noise(const std::string& rel) { SplitPlain(rel, RandomEdges(cfg_.edges_per_relation)); }

 private:
  const SynthConfig& cfg_;
  SynthDataset* data_;
  std::mt19937_64 rng_;
};

}  // namespace

SynthDataset GenerateSynthetic(const SynthConfig& config) {
  if (config.n_entities < 20) throw Error("synth: n_entities must be >= 20");
  if (config.n_relations < 1) throw Error("synth: n_relations must be >= 1");
  if (config.edges_per_relation < 2) throw Error("synth: edges_per_relation must be >= 2");
  const auto alloc = AllocateRelations(config.mix, config.n_relations);

  SynthDataset data;
  const auto width =
      std::max<size_t>(3, std::to_string(config.n_entities - 1).size());
  for (int64_t i = 0; i < config.n_entities; ++i) {
    data.entities.push_back(fmt::format("e{:0{}}", i, width));
  }
  Generator gen(config, &data);
  for (const auto& [pattern, count] : alloc) {
    switch (pattern) {
      case Pattern::kSymmetric:
        for (int64_t i = 0; i < count; ++i) {
          const auto name = fmt::format("sym{}", i);
          data.relations.push_back({name, pattern});
          gen.Symmetric(name);
        }
        break;
      case Pattern::kCompositional:
        for (int64_t i = 0; i < count / 3; ++i) {
          const auto a = fmt::format("comp{}_a", i), b = fmt::format("comp{}_b", i),
                     ab = fmt::format("comp{}_ab", i);
          for (const auto& n : {a, b, ab}) data.relations.push_back({n, pattern});
          gen.Compositional(a, b, ab);
        }
        break;
      case Pattern::kNoise:
        for (int64_t i = 0; i < count; ++i) {
          const auto name = fmt::format("noise{}", i);
          data.relations.push_back({name, pattern});
          gen.Noise(name);
        }
        break;
    }
  }
  return data;
}

void WriteSynthetic(const SynthDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, const std::vector<NamedTriple>*> files[] = {
      {"train.txt", &data.train}, {"valid.txt", &data.valid}, {"test.txt", &data.test}};
  for (const auto& [name, triples] : files) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    for (const auto& t : *triples) out << t.head << '\t' << t.rel << '\t' << t.tail << '\n';
  }
}

}  // namespace nase
