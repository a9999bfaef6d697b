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

#include "nase/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace nase {

using nlohmann::json;

const std::vector<std::string>& RunConfigKeys() {
  static const std::vector<std::string> keys = {
      "dataset_dir", "out_dir", "seed", "dim", "n_layers", "reshape", "lr", "batch_size",
      "n_neg", "epochs", "patience", "valid_every", "l2", "optimizer", "p_norm", "precision",
      "epochs_search", "lr_alpha", "alpha_source", "alpha_optimizer", "conv_filters",
      "conv_score_filters", "mlp_hidden", "tie_policy", "protocol", "hits",
      "disable_rep_search", "disable_score_search", "fixed_score_fn", "fusion_mode",
      "per_relation_translation", "threads", "log_wall_time"};
  return keys;
}

json RunConfigToJson(const RunConfig& c) {
  json j;
  j["dataset_dir"] = c.dataset_dir;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["dim"] = c.dim;
  j["n_layers"] = c.n_layers;
  j["reshape"] = c.reshape ? json(*c.reshape) : json(nullptr);
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["n_neg"] = c.n_neg;
  j["epochs"] = c.epochs;
  j["patience"] = c.patience;
  j["valid_every"] = c.valid_every;
  j["l2"] = c.l2;
  j["optimizer"] = c.optimizer;
  j["p_norm"] = c.p_norm;
  j["precision"] = PrecisionName(c.precision);
  j["epochs_search"] = c.epochs_search;
  j["lr_alpha"] = c.lr_alpha;
  j["alpha_source"] = AlphaSourceName(c.alpha_source);
  j["alpha_optimizer"] = c.alpha_optimizer;
  j["conv_filters"] = c.conv_filters;
  j["conv_score_filters"] = c.conv_score_filters;
  j["mlp_hidden"] = c.mlp_hidden;
  j["tie_policy"] = TiePolicyName(c.tie_policy);
  j["protocol"] = ProtocolName(c.protocol);
  j["hits"] = c.hits;
  j["disable_rep_search"] = c.disable_rep_search;
  j["disable_score_search"] = c.disable_score_search;
  j["fixed_score_fn"] = c.fixed_score_fn;
  j["fusion_mode"] = FusionModeName(c.fusion_mode);
  j["per_relation_translation"] = c.per_relation_translation;
  j["threads"] = c.threads;
  j["log_wall_time"] = c.log_wall_time;
  return j;
}

namespace {

template <typename T>
T Get(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned() && v.get<int64_t>() < 0) throw ConfigError("");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("");
    } else {
      if (!v.is_string()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has an invalid value " + v.dump());
  }
}

template <typename Fn>
auto Parse(const json& v, const std::string& key, Fn parse) {
  try {
    return parse(Get<std::string>(v, key));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

RunConfig RunConfigFromJson(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto& keys = RunConfigKeys();
  for (const auto& [key, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if (key == "dataset_dir") c.dataset_dir = Get<std::string>(v, key);
    else if (key == "out_dir") c.out_dir = Get<std::string>(v, key);
    else if (key == "seed") c.seed = Get<uint64_t>(v, key);
    else if (key == "dim") c.dim = Get<int64_t>(v, key);
    else if (key == "n_layers") c.n_layers = Get<int>(v, key);
    else if (key == "reshape") {
      if (v.is_null()) {
        c.reshape.reset();
      } else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() &&
                 v[1].is_number_integer()) {
        c.reshape = std::array<int64_t, 2>{v[0].get<int64_t>(), v[1].get<int64_t>()};
      } else {
        throw ConfigError("config key 'reshape' must be null or [rows, cols]");
      }
    }
    else if (key == "lr") c.lr = Get<double>(v, key);
    else if (key == "batch_size") c.batch_size = Get<int64_t>(v, key);
    else if (key == "n_neg") c.n_neg = Get<int64_t>(v, key);
    else if (key == "epochs") c.epochs = Get<int>(v, key);
    else if (key == "patience") c.patience = Get<int>(v, key);
    else if (key == "valid_every") c.valid_every = Get<int>(v, key);
    else if (key == "l2") c.l2 = Get<double>(v, key);
    else if (key == "optimizer") c.optimizer = Get<std::string>(v, key);
    else if (key == "p_norm") c.p_norm = Get<int>(v, key);
    else if (key == "precision") c.precision = Parse(v, key, ParsePrecision);
    else if (key == "epochs_search") c.epochs_search = Get<int>(v, key);
    else if (key == "lr_alpha") c.lr_alpha = Get<double>(v, key);
    else if (key == "alpha_source") c.alpha_source = Parse(v, key, ParseAlphaSource);
    else if (key == "alpha_optimizer") c.alpha_optimizer = Get<std::string>(v, key);
    else if (key == "conv_filters") c.conv_filters = Get<int64_t>(v, key);
    else if (key == "conv_score_filters") c.conv_score_filters = Get<int64_t>(v, key);
    else if (key == "mlp_hidden") c.mlp_hidden = Get<int64_t>(v, key);
    else if (key == "tie_policy") c.tie_policy = Parse(v, key, ParseTiePolicy);
    else if (key == "protocol") c.protocol = Parse(v, key, ParseProtocol);
    else if (key == "hits") {
      if (!v.is_array()) throw ConfigError("config key 'hits' must be a list of integers");
      c.hits.clear();
      for (const auto& k : v) c.hits.push_back(Get<int>(k, key));
    }
    else if (key == "disable_rep_search") c.disable_rep_search = Get<bool>(v, key);
    else if (key == "disable_score_search") c.disable_score_search = Get<bool>(v, key);
    else if (key == "fixed_score_fn") c.fixed_score_fn = Get<std::string>(v, key);
    else if (key == "fusion_mode") c.fusion_mode = Parse(v, key, ParseFusionMode);
    else if (key == "per_relation_translation") c.per_relation_translation = Get<bool>(v, key);
    else if (key == "threads") c.threads = Get<int>(v, key);
    else if (key == "log_wall_time") c.log_wall_time = Get<bool>(v, key);
  }
  return c;
}

void RunConfig::Validate() const {
  try {
    Train().Validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  auto check_opt = [](const std::string& key, const std::string& v) {
    if (v != "sgd" && v != "adam") {
      throw ConfigError("config key '" + key + "' must be sgd or adam, got '" + v + "'");
    }
  };
  check_opt("optimizer", optimizer);
  check_opt("alpha_optimizer", alpha_optimizer);
  if (epochs_search < 0) throw ConfigError("epochs_search must be >= 0");
  if (lr < 0 || lr_alpha < 0 || l2 < 0) throw ConfigError("lr, lr_alpha and l2 must be >= 0");
  if (conv_filters < 1 || conv_score_filters < 1) throw ConfigError("filter counts must be >= 1");
  if (mlp_hidden < 0) throw ConfigError("mlp_hidden must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  for (int k : hits) {
    if (k < 1) throw ConfigError("hits entries must be >= 1");
  }
  try {
    ParseScoreFnKind(fixed_score_fn);
  } catch (const Error& e) {
    throw ConfigError(std::string("config key 'fixed_score_fn': ") + e.what());
  }
  if (reshape && ((*reshape)[0] < 1 || (*reshape)[1] < 1 || (*reshape)[0] * (*reshape)[1] != dim)) {
    throw ConfigError("reshape " + std::to_string((*reshape)[0]) + "x" +
                      std::to_string((*reshape)[1]) + " does not factor dim " +
                      std::to_string(dim));
  }
  if (!disable_rep_search && !reshape && dim != 400) {
    throw ConfigError("conv2d operators are enabled; set reshape [rows, cols] with rows*cols == " +
                      std::to_string(dim));
  }
}

TrainConfig RunConfig::Train() const {
  TrainConfig t;
  t.dim = dim;
  t.n_layers = n_layers;
  t.lr = lr;
  t.batch_size = batch_size;
  t.n_neg = n_neg;
  t.epochs = epochs;
  t.seed = seed;
  t.p_norm = p_norm;
  t.precision = precision;
  t.patience = patience;
  t.valid_every = valid_every;
  t.l2 = l2;
  t.optimizer = optimizer;
  t.tie_policy = tie_policy;
  t.threads = threads;
  t.log_wall_time = log_wall_time;
  return t;
}

SearchConfig RunConfig::Search() const {
  SearchConfig s;
  s.epochs = epochs_search;
  s.lr_theta = lr;
  s.lr_alpha = lr_alpha;
  s.batch_size = batch_size;
  s.n_neg = n_neg;
  s.alpha_source = alpha_source;
  s.alpha_optimizer = alpha_optimizer;
  s.theta_optimizer = optimizer;
  s.l2 = l2;
  s.seed = seed;
  return s;
}

ModelExtras RunConfig::Extras() const { return {fusion_mode, per_relation_translation}; }

SearchSpace RunConfig::Space() const {
  SearchSpace s = SearchSpace::Full(n_layers);
  if (disable_rep_search) {
    for (auto& layer : s.rep) {
      for (auto& edge : layer) edge = {OperatorKind::kIdentity};
    }
  }
  if (disable_score_search) s.score = {ParseScoreFnKind(fixed_score_fn)};
  return s;
}

ModelConfig RunConfig::SearchModel(int64_t num_entities, int64_t num_relations) const {
  ModelConfig m;
  m.num_entities = num_entities;
  m.num_relations = num_relations;
  m.dim = dim;
  m.n_layers = n_layers;
  m.reshape = reshape;
  m.conv_filters = conv_filters;
  m.conv_score_filters = conv_score_filters;
  m.mlp_hidden = mlp_hidden;
  m.p_norm = p_norm;
  m.fusion = fusion_mode;
  m.per_relation_translation = per_relation_translation;
  return m;
}

RunConfig ResolveRunConfig(const std::optional<std::filesystem::path>& file,
                           const json& overrides) {
  RunConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot read config file " + file->string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + file->string() + " is not valid JSON: " + e.what());
    }
    c = RunConfigFromJson(j, c);
  }
  if (const char* env = std::getenv("NASE_SEED"); env && *env) {
    try {
      size_t used = 0;
      const auto seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing");
      c.seed = seed;
    } catch (const std::exception&) {
      throw ConfigError(std::string("NASE_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return RunConfigFromJson(overrides, c);
}

std::array<int64_t, 2> SquarestReshape(int64_t d) {
  if (d < 1) throw ConfigError("dim must be positive");
  auto rows = static_cast<int64_t>(std::sqrt(static_cast<double>(d)));
  while (rows > 1 && d % rows != 0) --rows;
  return {rows, d / rows};
}

}  // namespace nase
