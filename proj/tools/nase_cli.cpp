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

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "nase/app.hpp"

namespace {

using nlohmann::json;
using namespace nase;

const std::set<std::string> kStringKeys = {
    "dataset_dir", "out_dir",    "optimizer", "precision",      "alpha_source",
    "alpha_optimizer", "tie_policy", "protocol", "fixed_score_fn", "fusion_mode"};
const std::set<std::string> kBoolKeys = {"disable_rep_search", "disable_score_search",
                                         "per_relation_translation", "log_wall_time"};

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json ParseScalar(const std::string& key, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    throw ConfigError("--" + key + ": cannot parse '" + text + "'");
  }
}

template <typename T>
std::vector<T> ParseList(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : SplitList(text)) out.push_back(ParseScalar(key, item).get<T>());
  if (out.empty()) throw ConfigError("--" + key + " must not be empty");
  return out;
}

// Every config key becomes --key; values set on the command line override the
// config file.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;

  void Attach(CLI::App* app) {
    app->add_option("--config", file, "JSON config file")->check(CLI::ExistingFile);
    for (const auto& key : RunConfigKeys()) {
      if (kBoolKeys.count(key)) {
        options[key] = app->add_flag("--" + key + ",!--no_" + key, flags[key]);
      } else {
        options[key] = app->add_option("--" + key, values[key]);
      }
    }
  }

  json Overrides() const {
    json j = json::object();
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      if (kBoolKeys.count(key)) {
        j[key] = flags.at(key);
        continue;
      }
      const std::string& v = values.at(key);
      if (kStringKeys.count(key)) {
        j[key] = v;
      } else if (key == "reshape") {
        if (v == "null" || v == "none") {
          j[key] = nullptr;
        } else {
          std::string s = v;
          std::replace(s.begin(), s.end(), 'x', ',');
          j[key] = ParseList<int64_t>(key, s);
        }
      } else if (key == "hits") {
        j[key] = ParseList<int>(key, v);
      } else {
        j[key] = ParseScalar(key, v);
      }
    }
    return j;
  }

  RunConfig Resolve() const {
    return ResolveRunConfig(file.empty() ? std::nullopt : std::optional<std::filesystem::path>(file),
                            Overrides());
  }
};

std::string ErrorKind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const DataError*>(&e)) return "data";
  if (dynamic_cast<const NonFiniteLossError*>(&e)) return "non_finite_loss";
  if (dynamic_cast<const json::exception*>(&e)) return "json";
  if (dynamic_cast<const Error*>(&e)) return "nase";
  return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural architecture search for knowledge graph embedding"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log_level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  ConfigFlags search_flags, train_flags, grid_flags;
  auto* search = app.add_subcommand("search", "search an architecture and derive its genotype");
  search_flags.Attach(search);

  auto* train = app.add_subcommand("train", "train a genotype from scratch");
  train_flags.Attach(train);
  std::string genotype_path;
  train->add_option("--genotype", genotype_path, "genotype JSON")->required();

  auto* eval = app.add_subcommand("eval", "rank test triples with a trained model");
  std::string model_path, eval_dataset, protocol = "filtered", tie = "mean", hits = "1,3,10",
                                        split = "test";
  int eval_threads = 1;
  eval->add_option("--model", model_path)->required();
  eval->add_option("--dataset_dir", eval_dataset)->required();
  eval->add_option("--protocol", protocol)->check(CLI::IsMember({"raw", "filtered"}));
  eval->add_option("--tie_policy", tie)->check(CLI::IsMember({"mean", "optimistic", "pessimistic"}));
  eval->add_option("--hits", hits, "comma-separated K values");
  eval->add_option("--split", split)->check(CLI::IsMember({"valid", "test"}));
  eval->add_option("--threads", eval_threads)->check(CLI::PositiveNumber);

  auto* derive = app.add_subcommand("derive", "re-derive a genotype from a search checkpoint");
  std::string ckpt_path, derive_out;
  derive->add_option("--checkpoint", ckpt_path)->required();
  derive->add_option("--out", derive_out, "write the genotype here");

  auto* synth = app.add_subcommand("synth", "generate a synthetic knowledge graph");
  SynthConfig synth_cfg;
  std::string mix = "symmetric=1,compositional=1", synth_out;
  synth->add_option("--n_entities", synth_cfg.n_entities);
  synth->add_option("--n_relations", synth_cfg.n_relations);
  synth->add_option("--pattern_mix", mix);
  synth->add_option("--seed", synth_cfg.seed);
  synth->add_option("--edges_per_relation", synth_cfg.edges_per_relation);
  synth->add_option("--out_dir", synth_out)->required();

  auto* grid = app.add_subcommand("grid", "search + train over a hyperparameter grid");
  grid_flags.Attach(grid);
  std::string grid_n = "1,2,3,4", grid_d = "100,200,400", grid_lr = "1e-2,1e-3,1e-4",
              grid_b = "128,256";
  grid->add_option("--grid_n_layers", grid_n);
  grid->add_option("--grid_dims", grid_d);
  grid->add_option("--grid_lrs", grid_lr);
  grid->add_option("--grid_batch_sizes", grid_b);

  auto* stats = app.add_subcommand("stats", "print dataset statistics");
  std::string stats_dataset;
  stats->add_option("--dataset_dir", stats_dataset)->required();

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_logger_mt("nase");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  std::string command = app.get_subcommands().front()->get_name();
  try {
    json out;
    if (command == "search") {
      out = CmdSearch(search_flags.Resolve());
    } else if (command == "train") {
      out = CmdTrain(train_flags.Resolve(), genotype_path);
    } else if (command == "eval") {
      EvalOptions opts;
      opts.protocol = ParseProtocol(protocol);
      opts.tie_policy = ParseTiePolicy(tie);
      opts.ks = ParseList<int>("hits", hits);
      opts.split = split == "valid" ? Split::kValid : Split::kTest;
      opts.threads = eval_threads;
      out = CmdEval(model_path, eval_dataset, opts);
      std::cout << out.dump() << "\n";
      Metrics m;
      m.mr = out["mr"];
      m.mrr = out["mrr"];
      for (const auto& [k, v] : out["hits"].items()) m.hits[std::stoi(k)] = v;
      m.n_queries = out["n_queries"];
      m.protocol = opts.protocol;
      std::cout << MetricsTable(m);
      return 0;
    } else if (command == "derive") {
      out = GenotypeToJson(CmdDerive(ckpt_path, derive_out.empty()
                                                    ? std::nullopt
                                                    : std::optional<std::filesystem::path>(derive_out)));
    } else if (command == "synth") {
      synth_cfg.mix = ParsePatternMix(mix);
      out = CmdSynth(synth_cfg, synth_out);
    } else if (command == "grid") {
      GridSpec spec;
      spec.n_layers = ParseList<int>("grid_n_layers", grid_n);
      spec.dims = ParseList<int64_t>("grid_dims", grid_d);
      spec.lrs = ParseList<double>("grid_lrs", grid_lr);
      spec.batch_sizes = ParseList<int64_t>("grid_batch_sizes", grid_b);
      out = CmdGrid(grid_flags.Resolve(), spec);
    } else if (command == "stats") {
      out = CmdStats(stats_dataset);
    }
    std::cout << out.dump() << "\n";
  } catch (const std::exception& e) {
    json err = {{"error", {{"command", command}, {"kind", ErrorKind(e)}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
