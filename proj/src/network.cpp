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

#include "nase/network.hpp"

#include <algorithm>
#include <cmath>

#include "nase/ops.hpp"

namespace nase {

using nlohmann::json;

void Genotype::Validate() const {
  if (n_layers < 0) throw Error("genotype: n_layers must be >= 0");
  if (static_cast<int>(rep_choices.size()) != n_layers) {
    throw Error("genotype: n_layers " + std::to_string(n_layers) + " but " +
                std::to_string(rep_choices.size()) + " layer choices");
  }
  for (const auto& layer : rep_choices) {
    for (const auto& name : layer) ParseOperatorKind(name);
  }
  ParseScoreFnKind(score_choice);
  if (dim < 1) throw Error("genotype: dim must be positive");
}

json GenotypeToJson(const Genotype& g) {
  json rep = json::array();
  for (const auto& layer : g.rep_choices) rep.push_back({layer[0], layer[1], layer[2]});
  json j;
  j["format"] = kGenotypeFormat;
  j["n_layers"] = g.n_layers;
  j["rep_choices"] = rep;
  j["score_choice"] = g.score_choice;
  j["dim"] = g.dim;
  j["reshape"] = g.reshape ? json{(*g.reshape)[0], (*g.reshape)[1]} : json(nullptr);
  j["conv_filters"] = g.conv_filters;
  j["conv_score_filters"] = g.conv_score_filters;
  j["mlp_hidden"] = g.mlp_hidden;
  return j;
}

Genotype GenotypeFromJson(const json& j) {
  if (j.value("format", "") != kGenotypeFormat) {
    throw Error(std::string("genotype: expected format ") + kGenotypeFormat);
  }
  Genotype g;
  g.n_layers = j.at("n_layers").get<int>();
  for (const auto& layer : j.at("rep_choices")) {
    if (layer.size() != 3) throw Error("genotype: each layer needs 3 choices");
    g.rep_choices.push_back({layer[0].get<std::string>(), layer[1].get<std::string>(),
                             layer[2].get<std::string>()});
  }
  g.score_choice = j.at("score_choice").get<std::string>();
  g.dim = j.at("dim").get<int64_t>();
  if (!j.at("reshape").is_null()) {
    g.reshape = std::array<int64_t, 2>{j["reshape"][0].get<int64_t>(),
                                       j["reshape"][1].get<int64_t>()};
  }
  g.conv_filters = j.at("conv_filters").get<int64_t>();
  g.conv_score_filters = j.at("conv_score_filters").get<int64_t>();
  g.mlp_hidden = j.at("mlp_hidden").get<int64_t>();
  g.Validate();
  return g;
}

json ModelConfigToJson(const ModelConfig& c) {
  json j;
  j["num_entities"] = c.num_entities;
  j["num_relations"] = c.num_relations;
  j["dim"] = c.dim;
  j["n_layers"] = c.n_layers;
  j["reshape"] = c.reshape ? json{(*c.reshape)[0], (*c.reshape)[1]} : json(nullptr);
  j["conv_filters"] = c.conv_filters;
  j["conv_score_filters"] = c.conv_score_filters;
  j["mlp_hidden"] = c.mlp_hidden;
  j["p_norm"] = c.p_norm;
  j["fusion_mode"] = FusionModeName(c.fusion);
  j["per_relation_translation"] = c.per_relation_translation;
  return j;
}

ModelConfig ModelConfigFromJson(const json& j) {
  ModelConfig c;
  c.num_entities = j.at("num_entities").get<int64_t>();
  c.num_relations = j.at("num_relations").get<int64_t>();
  c.dim = j.at("dim").get<int64_t>();
  c.n_layers = j.at("n_layers").get<int>();
  if (!j.at("reshape").is_null()) {
    c.reshape = std::array<int64_t, 2>{j["reshape"][0].get<int64_t>(),
                                       j["reshape"][1].get<int64_t>()};
  }
  c.conv_filters = j.at("conv_filters").get<int64_t>();
  c.conv_score_filters = j.at("conv_score_filters").get<int64_t>();
  c.mlp_hidden = j.at("mlp_hidden").get<int64_t>();
  c.p_norm = j.at("p_norm").get<int>();
  c.fusion = ParseFusionMode(j.at("fusion_mode").get<std::string>());
  c.per_relation_translation = j.at("per_relation_translation").get<bool>();
  return c;
}

SearchSpace SearchSpace::Full(int n_layers) {
  SearchSpace s;
  for (int l = 0; l < n_layers; ++l) {
    s.rep.push_back({AllOperatorKinds(), AllOperatorKinds(), AllOperatorKinds()});
  }
  s.score = AllScoreFnKinds();
  return s;
}

SearchSpace SearchSpace::FromGenotype(const Genotype& g) {
  g.Validate();
  SearchSpace s;
  for (const auto& layer : g.rep_choices) {
    s.rep.push_back({std::vector{ParseOperatorKind(layer[0])},
                     std::vector{ParseOperatorKind(layer[1])},
                     std::vector{ParseOperatorKind(layer[2])}});
  }
  s.score = {ParseScoreFnKind(g.score_choice)};
  return s;
}

bool SearchSpace::IsDiscrete() const {
  for (const auto& layer : rep) {
    for (const auto& c : layer) {
      if (c.size() != 1) return false;
    }
  }
  return score.size() == 1;
}

json SearchSpaceToJson(const SearchSpace& s) {
  json rep = json::array();
  for (const auto& layer : s.rep) {
    json l = json::array();
    for (const auto& cands : layer) {
      json names = json::array();
      for (OperatorKind k : cands) names.push_back(OperatorName(k));
      l.push_back(names);
    }
    rep.push_back(l);
  }
  json score = json::array();
  for (ScoreFnKind k : s.score) score.push_back(ScoreFnName(k));
  return {{"rep", rep}, {"score", score}};
}

SearchSpace SearchSpaceFromJson(const json& j) {
  SearchSpace s;
  for (const auto& layer : j.at("rep")) {
    std::array<std::vector<OperatorKind>, 3> l;
    for (int t = 0; t < 3; ++t) {
      for (const auto& name : layer.at(t)) l[t].push_back(ParseOperatorKind(name));
    }
    s.rep.push_back(l);
  }
  for (const auto& name : j.at("score")) s.score.push_back(ParseScoreFnKind(name));
  return s;
}

std::string RepEdgeName(int layer, Target t) {
  return "rep.l" + std::to_string(layer) + "." + std::string(1, TargetLetter(t));
}

std::string AlphaParamName(const std::string& edge) { return "alpha." + edge; }

std::vector<double> SoftmaxValues(const std::vector<double>& logits) {
  if (logits.empty()) return {};
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0;
  for (size_t i = 0; i < logits.size(); ++i) z += out[i] = std::exp(logits[i] - mx);
  for (auto& v : out) v /= z;
  return out;
}

double Entropy(const std::vector<double>& probs) {
  double h = 0;
  for (double p : probs) {
    if (p > 0) h -= p * std::log(p);
  }
  return h;
}

template <typename T>
KgeNetwork<T>::KgeNetwork(const ModelConfig& cfg, const SearchSpace& space, uint64_t seed)
    : cfg_(cfg), space_(space) {
  if (cfg.num_entities < 1 || cfg.num_relations < 1) {
    throw Error("model needs at least one entity and one relation");
  }
  if (cfg.dim < 1) throw Error("dim must be positive");
  if (cfg.p_norm != 1 && cfg.p_norm != 2) throw Error("p_norm must be 1 or 2");
  if (space.n_layers() != cfg.n_layers) {
    throw Error("search space has " + std::to_string(space.n_layers()) +
                " layers, config has " + std::to_string(cfg.n_layers));
  }
  std::mt19937_64 rng(seed);
  const T bound = static_cast<T>(6.0 / std::sqrt(static_cast<double>(cfg.dim)));
  entities_ = store_.AddUniform("emb.entity", {cfg.num_entities, cfg.dim}, bound, rng);
  relations_ = store_.AddUniform("emb.relation", {cfg.num_relations, cfg.dim}, bound, rng);
  for (int l = 0; l < cfg.n_layers; ++l) {
    layers_.push_back(
        std::make_unique<RepresentationLayer<T>>(l, cfg, space.rep[l], store_, rng));
  }
  scorers_ = std::make_unique<ScorerBank<T>>(cfg, space.score, store_, rng);

  // Architecture logits start at zero: an exact uniform mixture.
  for (int l = 0; l < cfg.n_layers; ++l) {
    for (Target t : kTargets) {
      const auto n = static_cast<int64_t>(space.rep[l][static_cast<int>(t)].size());
      if (n > 1) store_.AddZeros(AlphaParamName(RepEdgeName(l, t)), {n}, Group::kAlpha);
    }
  }
  if (space.score.size() > 1) {
    store_.AddZeros(AlphaParamName(kScoreEdgeName),
                    {static_cast<int64_t>(space.score.size())}, Group::kAlpha);
  }
}

template <typename T>
Tensor<T> KgeNetwork<T>::MixWeights(const std::string& edge) const {
  const std::string name = AlphaParamName(edge);
  if (!store_.Contains(name)) return {};
  return ops::Softmax(store_.Get(name).tensor);
}

template <typename T>
Embeddings<T> KgeNetwork<T>::Refine(const std::vector<int64_t>& heads,
                                    const std::vector<int64_t>& rels,
                                    const std::vector<int64_t>& tails) const {
  if (heads.size() != rels.size() || heads.size() != tails.size()) {
    throw Error("forward: heads/rels/tails lengths differ");
  }
  Embeddings<T> e{ops::Gather(entities_, heads), ops::Gather(relations_, rels),
                  ops::Gather(entities_, tails)};
  for (int l = 0; l < cfg_.n_layers; ++l) {
    std::array<Tensor<T>, 3> weights;
    for (Target t : kTargets) weights[static_cast<int>(t)] = MixWeights(RepEdgeName(l, t));
    e = layers_[l]->Forward(e, weights, rels);
  }
  return e;
}

template <typename T>
Tensor<T> KgeNetwork<T>::Forward(const std::vector<int64_t>& heads,
                                 const std::vector<int64_t>& rels,
                                 const std::vector<int64_t>& tails) const {
  const Embeddings<T> e = Refine(heads, rels, tails);
  const auto& kinds = scorers_->kinds();
  if (kinds.size() == 1) return scorers_->Score(kinds[0], e, rels);
  const Tensor<T> weights = MixWeights(kScoreEdgeName);
  Tensor<T> out;
  for (size_t i = 0; i < kinds.size(); ++i) {
    auto term = ops::Scale(scorers_->Score(kinds[i], e, rels),
                           ops::Pick(weights, static_cast<int64_t>(i)));
    out = out.defined() ? ops::Add(out, term) : term;
  }
  return out;
}

template <typename T>
ArchWeights KgeNetwork<T>::Arch() const {
  auto edge = [&](const std::string& name, std::vector<std::string> candidates) {
    HyperedgeWeights w;
    w.name = name;
    w.candidates = std::move(candidates);
    const std::string pname = AlphaParamName(name);
    if (store_.Contains(pname)) {
      const auto v = store_.Get(pname).tensor.data();
      w.alpha.assign(v.begin(), v.end());
    } else {
      w.alpha.assign(w.candidates.size(), 0.0);
    }
    return w;
  };
  ArchWeights a;
  for (int l = 0; l < cfg_.n_layers; ++l) {
    for (Target t : kTargets) {
      std::vector<std::string> names;
      for (OperatorKind k : space_.rep[l][static_cast<int>(t)]) names.push_back(OperatorName(k));
      a.rep.push_back(edge(RepEdgeName(l, t), std::move(names)));
    }
  }
  std::vector<std::string> names;
  for (ScoreFnKind k : space_.score) names.push_back(ScoreFnName(k));
  a.score = edge(kScoreEdgeName, std::move(names));
  return a;
}

template class KgeNetwork<float>;
template class KgeNetwork<double>;

}  // namespace nase
