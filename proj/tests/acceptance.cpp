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

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "gradient_suite.hpp"
#include "nase/app.hpp"
#include "nase/ops.hpp"
#include "nase/search.hpp"
#include "nase/training.hpp"
#include "test_util.hpp"

using namespace nase;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kGradTol = 1e-6;
constexpr double kGradSuiteSeconds = 120;
constexpr double kDegenerationTol = 1e-6;
constexpr int kDegenerationTriples = 1000;
constexpr int kRankingQueries = 1000;
constexpr double kMixtureTolF32 = 1e-4;
constexpr int kMixtureTriples = 1000;
constexpr int kArgmaxVectors = 10000;
constexpr double kSaturatedLogit = 40;
constexpr double kSearchMrrRatio = 0.95;
constexpr double kSyntheticMinutes = 30;
constexpr double kAblationSlack = 0.02;
constexpr int64_t kFb15kEntities = 14541, kFb15kRelations = 237, kFb15kTrain = 272115;
const std::vector<uint64_t> kSeeds = {1, 2, 3};

struct Outcome {
  std::string status;  // PASS | FAIL | SKIP
  std::string detail;
};

Outcome Verdict(bool ok, std::string detail) { return {ok ? "PASS" : "FAIL", std::move(detail)}; }

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<Triple> RandomTriples(int64_t n_ent, int64_t n_rel, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Triple> out(count);
  for (auto& t : out) {
    t = {static_cast<int64_t>(rng() % n_ent), static_cast<int64_t>(rng() % n_rel),
         static_cast<int64_t>(rng() % n_ent)};
  }
  return out;
}

void Columns(const std::vector<Triple>& ts, std::vector<int64_t>& h, std::vector<int64_t>& r,
             std::vector<int64_t>& t) {
  for (const auto& x : ts) {
    h.push_back(x.head);
    r.push_back(x.rel);
    t.push_back(x.tail);
  }
}

// 1. Gradient suite with coverage of every primitive, operator, scorer and
// the fusion gate.
Outcome GradientSuite() {
  const auto start = std::chrono::steady_clock::now();
  const auto cases = testing::RunGradientSuite(7);
  const double secs = Seconds(start);
  double worst = 0;
  std::string worst_name;
  int kinks = 0;
  std::set<std::string> names;
  for (const auto& c : cases) {
    names.insert(c.group + "/" + c.name);
    kinks += c.result.nonsmooth_coordinates;
    if (c.result.max_rel_error >= worst) {
      worst = c.result.max_rel_error;
      worst_name = c.group + "/" + c.name;
    }
  }
  auto covered = [&](const std::string& prefix) {
    return std::any_of(names.begin(), names.end(),
                       [&](const std::string& n) { return n.rfind(prefix, 0) == 0; });
  };
  std::vector<std::string> missing;
  for (const auto& p : ops::PrimitiveNames()) {
    if (!covered("primitive/" + p)) missing.push_back(p);
  }
  for (OperatorKind k : AllOperatorKinds()) {
    for (Target t : kTargets) {
      const std::string n = "operator/" + OperatorName(k) + "." + TargetLetter(t);
      if (!names.count(n)) missing.push_back(n);
    }
  }
  for (ScoreFnKind k : AllScoreFnKinds()) {
    if (!covered("scorer/" + ScoreFnName(k))) missing.push_back(ScoreFnName(k));
  }
  for (const char* n : {"fusion/gate", "model/mixed_forward"}) {
    if (!covered(n)) missing.push_back(n);
  }
  const bool ok = worst < kGradTol && kinks == 0 && missing.empty() && secs < kGradSuiteSeconds;
  return Verdict(ok, fmt::format("{} cases, max rel err {:.2e} ({}), kinks {}, missing {}, {:.1f}s",
                                 cases.size(), worst, worst_name, kinks, missing.size(), secs));
}

// 2. Identity genotypes against scorers assembled directly from the tables.
Outcome Degeneration() {
  testing::TempDir dir("acc2");
  SynthConfig sc;
  sc.seed = 4;
  WriteSynthetic(GenerateSynthetic(sc), dir.path());
  const TripleStore store = LoadDataset(dir.path());
  const auto triples =
      RandomTriples(store.num_entities(), store.num_relations(), kDegenerationTriples, 5);
  std::vector<int64_t> h, r, t;
  Columns(triples, h, r, t);
  double worst = 0;
  for (ScoreFnKind k : AllScoreFnKinds()) {
    Genotype g;
    g.rep_choices = {{"identity", "identity", "identity"}};
    g.score_choice = ScoreFnName(k);
    g.dim = 16;
    g.conv_score_filters = 4;
    g.mlp_hidden = 12;
    TrainConfig c;
    c.dim = 16;
    c.epochs = 2;
    c.lr = 0.01;
    c.optimizer = "adam";
    c.seed = 6;
    c.precision = Precision::kF64;
    c.patience = 0;
    const auto fit = Fit<double>(g, store, c);
    const auto& m = *fit.model;
    auto p = [&](const std::string& n) { return m.params().Get(n).tensor; };
    const auto eh = ops::Gather(p("emb.entity"), h), er = ops::Gather(p("emb.relation"), r),
               et = ops::Gather(p("emb.entity"), t);
    Tensor<double> want;
    switch (k) {
      case ScoreFnKind::kTransE: want = ScoreTransE(eh, er, et, 1); break;
      case ScoreFnKind::kDistMult: want = ScoreDistMult(eh, er, et); break;
      case ScoreFnKind::kSimplE:
        want = ScoreSimplE(eh, er, et, ops::Gather(p("score.simple.aux_rel"), r));
        break;
      case ScoreFnKind::kConvScore:
        want = ScoreConv(eh, er, et, p("score.conv_score.filters"),
                         p("score.conv_score.filter_bias"), p("score.conv_score.w"));
        break;
      case ScoreFnKind::kMlp:
        want = ScoreMlp(eh, er, et, p("score.mlp.w1"), p("score.mlp.b1"), p("score.mlp.w2"),
                        p("score.mlp.b2"));
        break;
    }
    const auto got = m.Forward(h, r, t);
    for (int i = 0; i < kDegenerationTriples; ++i) {
      worst = std::max(worst, std::abs(got.data()[i] - want.data()[i]));
    }
  }
  return Verdict(worst <= kDegenerationTol,
                 fmt::format("5 scorers x {} triples, max abs diff {:.2e}",
                             kDegenerationTriples, worst));
}

// Sort-based oracle rank: position range of the gold's tie block.
double SortRank(const std::vector<double>& scores, size_t gold, TiePolicy policy) {
  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  size_t first = 0;
  while (scores[idx[first]] != scores[gold]) ++first;
  size_t last = first;
  while (last + 1 < idx.size() && scores[idx[last + 1]] == scores[gold]) ++last;
  if (policy == TiePolicy::kOptimistic) return static_cast<double>(first + 1);
  if (policy == TiePolicy::kPessimistic) return static_cast<double>(last + 1);
  return (static_cast<double>(first + 1) + static_cast<double>(last + 1)) / 2;
}

// 3. Ranking on a 50-entity synthetic store against a brute-force oracle.
Outcome RankingOracle() {
  SynthConfig sc;
  sc.n_entities = 50;
  sc.seed = 8;
  sc.edges_per_relation = 200;
  const SynthDataset data = GenerateSynthetic(sc);
  testing::TempDir dir("acc3");
  WriteSynthetic(data, dir.path());
  const TripleStore loaded = LoadDataset(dir.path());
  // Move train triples into the evaluated split until it holds the target
  // number of queries.
  std::vector<Triple> train = loaded.split(Split::kTrain), test = loaded.split(Split::kTest);
  while (static_cast<int>(test.size()) * 2 < kRankingQueries) {
    test.push_back(train.back());
    train.pop_back();
  }
  test.resize(kRankingQueries / 2);
  const TripleStore store(loaded.entities(), loaded.relations(), train,
                          loaded.split(Split::kValid), test);

  Genotype g;
  g.rep_choices = {{"identity", "identity", "identity"}};
  g.score_choice = "distmult";
  g.dim = 16;
  TrainConfig c;
  c.dim = 16;
  c.epochs = 5;
  c.lr = 0.01;
  c.optimizer = "adam";
  c.patience = 0;
  const auto fit = Fit<float>(g, store, c);
  const TripleScorer exact = MakeNetworkScorer(*fit.model);
  // Coarse rounding creates ties for the tie policies to resolve.
  const TripleScorer coarse = [exact](const std::vector<int64_t>& h,
                                      const std::vector<int64_t>& r,
                                      const std::vector<int64_t>& t) {
    auto s = exact(h, r, t);
    for (auto& x : s) x = std::round(x * 2) / 2;
    return s;
  };
  int64_t mismatches = 0, checked = 0, tied = 0;
  for (const auto* scorer : {&exact, &coarse}) {
    for (Protocol protocol : {Protocol::kRaw, Protocol::kFiltered}) {
      for (TiePolicy policy :
           {TiePolicy::kMean, TiePolicy::kOptimistic, TiePolicy::kPessimistic}) {
        EvalOptions o;
        o.protocol = protocol;
        o.tie_policy = policy;
        const auto ranks = QueryRanks(*scorer, store, o);
        size_t q = 0;
        for (const Triple& tr : store.split(Split::kTest)) {
          for (QuerySide side : {QuerySide::kTail, QuerySide::kHead}) {
            std::vector<int64_t> cands;
            if (protocol == Protocol::kFiltered) {
              cands = store.FilteredCandidates({tr, side});
            } else {
              cands.resize(store.num_entities());
              std::iota(cands.begin(), cands.end(), 0);
            }
            std::vector<int64_t> hs, rs, ts;
            size_t gold = 0;
            for (size_t i = 0; i < cands.size(); ++i) {
              Triple x = tr;
              (side == QuerySide::kTail ? x.tail : x.head) = cands[i];
              if (x == tr) gold = i;
              hs.push_back(x.head);
              rs.push_back(x.rel);
              ts.push_back(x.tail);
            }
            const auto scores = (*scorer)(hs, rs, ts);
            const double want = SortRank(scores, gold, policy);
            tied += policy == TiePolicy::kMean &&
                    std::count(scores.begin(), scores.end(), scores[gold]) > 1;
            mismatches += q >= ranks.size() || ranks[q] != want;
            ++q;
            ++checked;
          }
        }
        mismatches += q != ranks.size();
      }
    }
  }
  return Verdict(mismatches == 0 && tied > 0,
                 fmt::format("{} queries x 2 scorers x 2 protocols x 3 policies, {} mismatches, "
                             "{} tied gold scores",
                             kRankingQueries, mismatches, tied));
}

// 4. Saturated mixtures against discrete architectures; argmax invariance.
Outcome MixtureConsistency() {
  ModelConfig cfg;
  cfg.num_entities = 40;
  cfg.num_relations = 5;
  cfg.dim = 16;
  cfg.reshape = std::array<int64_t, 2>{4, 4};
  cfg.conv_filters = 3;
  cfg.conv_score_filters = 3;
  cfg.mlp_hidden = 8;
  cfg.n_layers = 2;
  std::mt19937_64 rng(9);
  const auto triples = RandomTriples(cfg.num_entities, cfg.num_relations, kMixtureTriples, 10);
  std::vector<int64_t> h, r, t;
  Columns(triples, h, r, t);
  double worst = 0;
  const int genotypes = 12;
  for (int gi = 0; gi < genotypes; ++gi) {
    Genotype g;
    g.n_layers = 2;
    for (int l = 0; l < 2; ++l) {
      std::array<std::string, 3> choice;
      for (auto& c : choice) c = OperatorName(AllOperatorKinds()[rng() % kNumOperatorKinds]);
      g.rep_choices.push_back(choice);
    }
    g.score_choice = ScoreFnName(AllScoreFnKinds()[gi % kNumScoreFnKinds]);
    g.dim = cfg.dim;
    g.reshape = cfg.reshape;
    g.conv_filters = cfg.conv_filters;
    g.conv_score_filters = cfg.conv_score_filters;
    g.mlp_hidden = cfg.mlp_hidden;
    KgeNetwork<float> mixed(cfg, SearchSpace::Full(2), 100 + gi);
    KgeNetwork<float> discrete(cfg, SearchSpace::FromGenotype(g), 200 + gi);
    for (const auto& p : discrete.params().all()) {
      const auto src = mixed.params().Get(p->name).tensor.data();
      std::copy(src.begin(), src.end(), p->tensor.mutable_data().begin());
    }
    auto saturate = [&](const std::string& edge, size_t n, size_t pick) {
      auto a = mixed.params().Get(AlphaParamName(edge)).tensor.mutable_data();
      for (size_t i = 0; i < n; ++i) a[i] = i == pick ? kSaturatedLogit : -kSaturatedLogit;
    };
    for (int l = 0; l < 2; ++l) {
      for (Target tg : kTargets) {
        saturate(RepEdgeName(l, tg), kNumOperatorKinds,
                 static_cast<size_t>(ParseOperatorKind(g.rep_choices[l][static_cast<int>(tg)])));
      }
    }
    saturate(kScoreEdgeName, kNumScoreFnKinds,
             static_cast<size_t>(ParseScoreFnKind(g.score_choice)));
    const auto a = mixed.Forward(h, r, t), b = discrete.Forward(h, r, t);
    for (int i = 0; i < kMixtureTriples; ++i) {
      worst = std::max(worst, std::abs(static_cast<double>(a.data()[i]) -
                                       static_cast<double>(b.data()[i])));
    }
  }
  // Derivation picks argmax(alpha) on random vectors.
  ModelConfig one = cfg;
  one.n_layers = 1;
  KgeNetwork<double> ref(one, SearchSpace::Full(1), 11);
  std::normal_distribution<double> normal(0, 2);
  int argmax_errors = 0;
  for (int i = 0; i < kArgmaxVectors; i += 4) {
    ArchWeights arch = ref.Arch();
    for (auto* e : {&arch.rep[0], &arch.rep[1], &arch.rep[2], &arch.score}) {
      for (auto& x : e->alpha) x = normal(rng);
    }
    const Genotype g = Derive(arch, one);
    auto best = [](const HyperedgeWeights& e) {
      const auto probs = SoftmaxValues(e.alpha);
      const auto by_alpha = std::max_element(e.alpha.begin(), e.alpha.end()) - e.alpha.begin();
      const auto by_prob = std::max_element(probs.begin(), probs.end()) - probs.begin();
      return std::pair{by_alpha == by_prob, e.candidates[by_alpha]};
    };
    for (int k = 0; k < 3; ++k) {
      const auto [same, name] = best(arch.rep[k]);
      argmax_errors += !same || g.rep_choices[0][k] != name;
    }
    const auto [same, name] = best(arch.score);
    argmax_errors += !same || g.score_choice != name;
  }
  return Verdict(worst <= kMixtureTolF32 && argmax_errors == 0,
                 fmt::format("{} genotypes x {} triples, max abs diff {:.2e} (f32); "
                             "{} argmax mismatches over {} vectors",
                             genotypes, kMixtureTriples, worst, argmax_errors, kArgmaxVectors));
}

struct SyntheticRun {
  double mrr = 0;
  double initial_entropy = 0, final_entropy = 0;
  std::string genotype;
};

double TestMrr(const RunConfig& c) {
  EvalOptions o;
  return CmdEval(fs::path(c.out_dir) / kModelFile, c.dataset_dir, o)["mrr"].get<double>();
}

std::string Describe(const json& g) {
  std::string s;
  for (const auto& layer : g["rep_choices"]) {
    for (const auto& op : layer) s += op.get<std::string>() + ",";
  }
  return s + g["score_choice"].get<std::string>();
}

SyntheticRun SearchAndRetrain(RunConfig c) {
  const json s = CmdSearch(c);
  CmdTrain(c, fs::path(c.out_dir) / kGenotypeFile);
  return {TestMrr(c), s["initial_mean_entropy"].get<double>(),
          s["final_mean_entropy"].get<double>(), Describe(s["genotype"])};
}

double Baseline(RunConfig c, const std::string& scorer, const fs::path& dir) {
  Genotype g;
  g.rep_choices = {{"identity", "identity", "identity"}};
  g.score_choice = scorer;
  g.dim = c.dim;
  g.reshape = c.reshape;
  g.conv_filters = c.conv_filters;
  g.conv_score_filters = c.conv_score_filters;
  g.mlp_hidden = c.mlp_hidden;
  fs::create_directories(dir);
  WriteGenotype(g, dir / (scorer + ".json"));
  c.out_dir = (dir / ("base_" + scorer)).string();
  CmdTrain(c, dir / (scorer + ".json"));
  return TestMrr(c);
}

struct SyntheticResults {
  std::vector<SyntheticRun> full;
  std::vector<double> transe, distmult;
  double minutes = 0;
};

RunConfig Profile(const fs::path& dataset, const fs::path& out, uint64_t seed) {
  RunConfig overrides;
  overrides.dataset_dir = dataset.string();
  overrides.out_dir = out.string();
  overrides.seed = seed;
  RunConfig c = ResolveRunConfig(fs::path(NASE_SOURCE_DIR) / "configs" / "synthetic.json",
                                 json{{"dataset_dir", dataset.string()},
                                      {"out_dir", out.string()},
                                      {"seed", seed}});
  return c;
}

// 5. Search + retrain against the TransE and DistMult baselines.
Outcome SyntheticSearch(const fs::path& root, SyntheticResults& res) {
  const auto start = std::chrono::steady_clock::now();
  for (uint64_t seed : kSeeds) {
    SynthConfig sc;
    sc.seed = seed;
    const fs::path data = root / fmt::format("syn{}", seed);
    CmdSynth(sc, data);
    const RunConfig c = Profile(data, root / fmt::format("full{}", seed), seed);
    res.full.push_back(SearchAndRetrain(c));
    res.transe.push_back(Baseline(c, "transe", root / fmt::format("base{}", seed)));
    res.distmult.push_back(Baseline(c, "distmult", root / fmt::format("base{}", seed)));
    spdlog::warn("seed {}: searched [{}] mrr {:.4f}, transe {:.4f}, distmult {:.4f}", seed,
                 res.full.back().genotype, res.full.back().mrr, res.transe.back(),
                 res.distmult.back());
  }
  res.minutes = Seconds(start) / 60;
  std::vector<double> mrr, init, fin;
  for (const auto& r : res.full) {
    mrr.push_back(r.mrr);
    init.push_back(r.initial_entropy);
    fin.push_back(r.final_entropy);
  }
  const double best_base = std::max(Mean(res.transe), Mean(res.distmult));
  const bool a = Mean(fin) < Mean(init);
  const bool b = Mean(mrr) >= kSearchMrrRatio * best_base;
  return Verdict(a && b && res.minutes < kSyntheticMinutes,
                 fmt::format("(a) entropy {:.4f} -> {:.4f} {}; (b) searched MRR {:.4f} vs "
                             "{} x max(TransE {:.4f}, DistMult {:.4f}) = {:.4f} {}; {:.1f} min",
                             Mean(init), Mean(fin), a ? "ok" : "not reduced", Mean(mrr),
                             kSearchMrrRatio, Mean(res.transe), Mean(res.distmult),
                             kSearchMrrRatio * best_base, b ? "ok" : "below", res.minutes));
}

// 6. Ablations over the same seeds and datasets.
Outcome Ablations(const fs::path& root, const SyntheticResults& res) {
  std::vector<double> full;
  for (const auto& r : res.full) full.push_back(r.mrr);
  const double full_mean = Mean(full);
  struct Ablation {
    std::string name;
    std::function<void(RunConfig&)> apply;
  };
  const std::vector<Ablation> ablations = {
      {"disable_rep_search", [](RunConfig& c) { c.disable_rep_search = true; }},
      {"disable_score_search", [](RunConfig& c) { c.disable_score_search = true; }},
      {"fusion_mode_add", [](RunConfig& c) { c.fusion_mode = FusionMode::kAdd; }},
  };
  bool ok = true;
  std::string detail = fmt::format("full {:.4f}", full_mean);
  for (const auto& ab : ablations) {
    std::vector<double> mrr;
    for (uint64_t seed : kSeeds) {
      RunConfig c = Profile(root / fmt::format("syn{}", seed),
                            root / fmt::format("{}{}", ab.name, seed), seed);
      ab.apply(c);
      mrr.push_back(SearchAndRetrain(c).mrr);
    }
    const bool pass = full_mean >= Mean(mrr) - kAblationSlack;
    ok &= pass;
    detail += fmt::format("; {} {:.4f}{}", ab.name, Mean(mrr), pass ? "" : " (exceeds full)");
  }
  return Verdict(ok, detail);
}

std::string StripWallTime(const fs::path& log) {
  std::ifstream in(log);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    json j = json::parse(line);
    j.erase("wall_time");
    out += j.dump() + "\n";
  }
  return out;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7. Two identical search + train runs.
Outcome Determinism(const fs::path& root) {
  std::vector<std::array<std::string, 3>> artifacts;
  for (int run = 0; run < 2; ++run) {
    RunConfig c = Profile(root / "syn1", root / fmt::format("det{}", run), 1);
    c.epochs_search = 5;
    c.epochs = 10;
    c.log_wall_time = true;
    CmdSearch(c);
    CmdTrain(c, fs::path(c.out_dir) / kGenotypeFile);
    const fs::path out = c.out_dir;
    artifacts.push_back({Slurp(out / kGenotypeFile), Slurp(out / kSearchLogFile),
                         StripWallTime(out / kFitLogFile)});
  }
  const bool g = artifacts[0][0] == artifacts[1][0];
  const bool s = artifacts[0][1] == artifacts[1][1];
  const bool f = artifacts[0][2] == artifacts[1][2];
  return Verdict(g && s && f, fmt::format("genotype {}, search log {}, fit log {}",
                                          g ? "identical" : "differs", s ? "identical" : "differs",
                                          f ? "identical" : "differs"));
}

// 8. FB15k-237 statistics.
Outcome Fb15k237() {
  const char* dir = std::getenv("NASE_FB15K237_DIR");
  if (!dir || !*dir || !fs::exists(fs::path(dir) / "train.txt")) {
    return {"SKIP", "set NASE_FB15K237_DIR to a directory with train/valid/test.txt"};
  }
  const TripleStore s = LoadDataset(dir);
  const auto st = s.Stats();
  return Verdict(st.entities == kFb15kEntities && st.relations == kFb15kRelations &&
                     st.train == kFb15kTrain,
                 fmt::format("{} entities, {} relations, {} train", st.entities, st.relations,
                             st.train));
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

  testing::TempDir root("acceptance");
  SyntheticResults synthetic;
  bool synthetic_done = false;
  int failures = 0;
  auto report = [&](int n, const Outcome& o) {
    failures += o.status == "FAIL";
    fmt::print("criterion {}: {} | {}\n", n, o.status, o.detail);
    std::fflush(stdout);
  };
  auto guarded = [&](int n, const std::function<Outcome()>& fn) {
    if (!wanted(n)) return;
    try {
      report(n, fn());
    } catch (const std::exception& e) {
      report(n, {"FAIL", std::string("exception: ") + e.what()});
    }
  };
  guarded(1, GradientSuite);
  guarded(2, Degeneration);
  guarded(3, RankingOracle);
  guarded(4, MixtureConsistency);
  guarded(5, [&] {
    auto o = SyntheticSearch(root.path(), synthetic);
    synthetic_done = true;
    return o;
  });
  guarded(6, [&] {
    if (!synthetic_done) SyntheticSearch(root.path(), synthetic);
    synthetic_done = true;
    return Ablations(root.path(), synthetic);
  });
  guarded(7, [&] {
    if (!fs::exists(root.path() / "syn1")) {
      SynthConfig sc;
      sc.seed = 1;
      CmdSynth(sc, root.path() / "syn1");
    }
    return Determinism(root.path());
  });
  guarded(8, Fb15k237);
  return failures == 0 ? 0 : 1;
}
