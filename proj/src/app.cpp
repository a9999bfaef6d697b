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

#include "nase/app.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <fstream>

namespace nase {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
auto WithPrecision(Precision p, Fn&& fn) {
  if (p == Precision::kF64) return fn(double{});
  return fn(float{});
}

void WriteJson(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::ofstream OpenLog(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

fs::path PrepareOutDir(const RunConfig& config) {
  if (config.out_dir.empty()) throw ConfigError("out_dir is required");
  if (config.dataset_dir.empty()) throw ConfigError("dataset_dir is required");
  const fs::path out(config.out_dir);
  fs::create_directories(out);
  WriteJson(RunConfigToJson(config), out / kConfigFile);
  return out;
}

}  // namespace

json StatsToJson(const DatasetStats& s, int64_t duplicates_dropped) {
  return {{"entities", s.entities}, {"relations", s.relations}, {"train", s.train},
          {"valid", s.valid},       {"test", s.test},           {"duplicates_dropped", duplicates_dropped}};
}

Genotype ReadGenotype(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read genotype file " + path.string());
  try {
    return GenotypeFromJson(json::parse(in));
  } catch (const json::exception& e) {
    throw Error("genotype file " + path.string() + " is malformed: " + e.what());
  }
}

void WriteGenotype(const Genotype& g, const fs::path& path) { WriteJson(GenotypeToJson(g), path); }

json CmdSearch(const RunConfig& config) {
  config.Validate();
  const fs::path out = PrepareOutDir(config);
  const TripleStore store = LoadDataset(config.dataset_dir);
  WriteJson(StatsToJson(store.Stats(), store.duplicates_dropped()), out / kStatsFile);

  const ModelConfig mcfg = config.SearchModel(store.num_entities(), store.num_relations());
  auto log = OpenLog(out / kSearchLogFile);
  SearchOptions options;
  options.log = &log;
  options.checkpoint = out / kSearchCheckpointFile;
  options.checkpoint_meta["config"] = RunConfigToJson(config).dump();

  const SearchResult result = WithPrecision(config.precision, [&](auto tag) {
    using T = decltype(tag);
    KgeNetwork<T> model(mcfg, config.Space(), config.seed);
    return RunSearch(model, store, config.Search(), options);
  });
  std::vector<std::string> ties;
  const Genotype g = Derive(result.arch, mcfg, &ties);
  WriteGenotype(g, out / kGenotypeFile);
  return {{"command", "search"},
          {"genotype", GenotypeToJson(g)},
          {"initial_mean_entropy", result.initial_mean_entropy},
          {"final_mean_entropy", MeanSearchableEntropy(result.arch)},
          {"derive_ties", ties},
          {"out_dir", out.string()}};
}

json CmdTrain(const RunConfig& config, const fs::path& genotype_path) {
  config.Validate();
  const Genotype g = ReadGenotype(genotype_path);
  const fs::path out = PrepareOutDir(config);
  const TripleStore store = LoadDataset(config.dataset_dir);
  WriteJson(StatsToJson(store.Stats(), store.duplicates_dropped()), out / kStatsFile);

  auto log = OpenLog(out / kFitLogFile);
  FitOptions options;
  options.log = &log;
  options.checkpoint = out / kModelFile;
  return WithPrecision(config.precision, [&](auto tag) {
    using T = decltype(tag);
    const FitResult<T> r = Fit<T>(g, store, config.Train(), config.Extras(), options);
    return json{{"command", "train"},
                {"best_valid_mrr", r.best_valid_mrr ? json(*r.best_valid_mrr) : json(nullptr)},
                {"best_epoch", r.best_epoch},
                {"epochs_run", r.log.size()},
                {"parameters", r.model->params().CountElements(Group::kTheta)},
                {"model", (out / kModelFile).string()}};
  });
}

json CmdEval(const fs::path& model_path, const fs::path& dataset, const EvalOptions& options) {
  const LoadedModelInfo info = ReadModelInfo(model_path);
  const TripleStore store = LoadDataset(dataset);
  if (info.model.num_entities != store.num_entities() ||
      info.model.num_relations != store.num_relations()) {
    throw Error(fmt::format("model {} was trained on {} entities / {} relations but dataset has {} / {}",
                            model_path.string(), info.model.num_entities,
                            info.model.num_relations, store.num_entities(),
                            store.num_relations()));
  }
  return WithPrecision(info.precision, [&](auto tag) {
    using T = decltype(tag);
    const auto model = LoadModel<T>(model_path);
    return MetricsToJson(Evaluate(MakeNetworkScorer(*model), store, options));
  });
}

Genotype CmdDerive(const fs::path& checkpoint, const std::optional<fs::path>& out) {
  const Genotype g = DeriveFromCheckpoint(checkpoint);
  if (out) WriteGenotype(g, *out);
  return g;
}

json CmdSynth(const SynthConfig& config, const fs::path& out_dir) {
  const SynthDataset data = GenerateSynthetic(config);
  WriteSynthetic(data, out_dir);
  json rels = json::object();
  for (const auto& [name, pattern] : data.relations) rels[name] = PatternName(pattern);
  return {{"command", "synth"},
          {"entities", data.entities.size()},
          {"relations", rels},
          {"train", data.train.size()},
          {"valid", data.valid.size()},
          {"test", data.test.size()},
          {"out_dir", out_dir.string()}};
}

json CmdStats(const fs::path& dataset) {
  const TripleStore store = LoadDataset(dataset);
  return StatsToJson(store.Stats(), store.duplicates_dropped());
}

json CmdGrid(const RunConfig& base, const GridSpec& grid) {
  if (base.out_dir.empty()) throw ConfigError("out_dir is required");
  const fs::path root(base.out_dir);
  fs::create_directories(root);
  auto log = OpenLog(root / "grid.jsonl");
  json best;
  for (int n : grid.n_layers) {
    for (int64_t d : grid.dims) {
      for (double lr : grid.lrs) {
        for (int64_t b : grid.batch_sizes) {
          RunConfig c = base;
          c.n_layers = n;
          c.dim = d;
          c.lr = lr;
          c.batch_size = b;
          if (!c.reshape || (*c.reshape)[0] * (*c.reshape)[1] != d) c.reshape = SquarestReshape(d);
          const std::string tag = fmt::format("N{}_d{}_lr{:g}_b{}", n, d, lr, b);
          c.out_dir = (root / tag).string();
          spdlog::info("grid point {}", tag);
          const json s = CmdSearch(c);
          const json t = CmdTrain(c, fs::path(c.out_dir) / kGenotypeFile);
          json rec = {{"point", tag},      {"n_layers", n},   {"dim", d},
                      {"lr", lr},          {"batch_size", b}, {"genotype", s["genotype"]},
                      {"best_valid_mrr", t["best_valid_mrr"]}};
          log << rec.dump() << "\n";
          log.flush();
          const bool better = best.is_null() ||
                              (rec["best_valid_mrr"].is_number() &&
                               (!best["best_valid_mrr"].is_number() ||
                                rec["best_valid_mrr"].get<double>() > best["best_valid_mrr"].get<double>()));
          if (better) best = rec;
        }
      }
    }
  }
  return {{"command", "grid"}, {"best", best}, {"log", (root / "grid.jsonl").string()}};
}

}  // namespace nase
