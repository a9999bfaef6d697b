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

#include "nase/search.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <sstream>

#include "nase/autodiff.hpp"
#include "nase/checkpoint.hpp"
#include "nase/training.hpp"

namespace nase {

using nlohmann::json;

std::string AlphaSourceName(AlphaSource s) {
  return s == AlphaSource::kValid ? "valid" : "train";
}

AlphaSource ParseAlphaSource(const std::string& name) {
  if (name == "valid") return AlphaSource::kValid;
  if (name == "train") return AlphaSource::kTrain;
  throw Error("unknown alpha_source '" + name + "' (expected valid|train)");
}

namespace {

size_t ArgmaxLowestTie(const std::vector<double>& alpha, bool* tied) {
  const auto probs = SoftmaxValues(alpha);
  size_t best = 0;
  for (size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  *tied = false;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (i != best && probs[i] == probs[best]) *tied = true;
  }
  return best;
}

json ArchToJson(const ArchWeights& arch) {
  json j = json::object();
  auto add = [&](const HyperedgeWeights& e) { j[e.name] = e.alpha; };
  for (const auto& e : arch.rep) add(e);
  add(arch.score);
  return j;
}

std::string BatchSummary(const Batch& b) {
  std::ostringstream os;
  const int64_t n = std::min<int64_t>(b.size(), 8);
  for (int64_t i = 0; i < n; ++i) {
    os << (i ? " " : "") << "(" << b.heads[i] << "," << b.rels[i] << "," << b.tails[i] << ")";
  }
  if (b.size() > n) os << " ...";
  return os.str();
}

}  // namespace

Genotype Derive(const ArchWeights& arch, const ModelConfig& cfg,
                std::vector<std::string>* ties) {
  Genotype g;
  g.n_layers = arch.n_layers();
  auto pick = [&](const HyperedgeWeights& e) {
    if (e.candidates.empty() || e.candidates.size() != e.alpha.size()) {
      throw Error("derive: malformed hyperedge '" + e.name + "'");
    }
    bool tied = false;
    const size_t best = ArgmaxLowestTie(e.alpha, &tied);
    if (tied && e.candidates.size() > 1) {
      spdlog::info("derive: tie on hyperedge {}, choosing {}", e.name, e.candidates[best]);
      if (ties) ties->push_back(e.name);
    }
    return e.candidates[best];
  };
  for (int l = 0; l < g.n_layers; ++l) {
    g.rep_choices.push_back({pick(arch.rep[3 * l]), pick(arch.rep[3 * l + 1]),
                             pick(arch.rep[3 * l + 2])});
  }
  g.score_choice = pick(arch.score);
  g.dim = cfg.dim;
  if (cfg.reshape) {
    g.reshape = cfg.reshape;
  } else if (cfg.dim == 400) {
    g.reshape = std::array<int64_t, 2>{20, 20};
  }
  g.conv_filters = cfg.conv_filters;
  g.conv_score_filters = cfg.conv_score_filters;
  g.mlp_hidden = cfg.mlp_hidden;
  return g;
}

template <typename T>
std::pair<double, double> SearchStep(KgeNetwork<T>& model, Optimizer<T>& theta_opt,
                                     Optimizer<T>& alpha_opt, const Batch& train_batch,
                                     const Batch& alpha_batch) {
  auto& store = model.params();
  auto check = [&](double loss, const Batch& batch, const char* phase) {
    if (std::isfinite(loss)) return;
    throw NonFiniteLossError(std::string("non-finite ") + phase + " loss; batch " +
                             BatchSummary(batch) + "; alpha " +
                             ArchToJson(model.Arch()).dump());
  };

  store.ZeroGrad(Group::kTheta);
  auto loss_theta = BceLoss(
      model.Forward(train_batch.heads, train_batch.rels, train_batch.tails), train_batch.labels);
  const double lt = static_cast<double>(loss_theta.item());
  check(lt, train_batch, "theta");
  Backward(loss_theta);
  theta_opt.Step(store.GroupMembers(Group::kTheta));

  store.ZeroGrad(Group::kAlpha);
  auto loss_alpha = BceLoss(
      model.Forward(alpha_batch.heads, alpha_batch.rels, alpha_batch.tails), alpha_batch.labels);
  const double la = static_cast<double>(loss_alpha.item());
  check(la, alpha_batch, "alpha");
  Backward(loss_alpha);
  const auto alpha = store.GroupMembers(Group::kAlpha);
  if (!alpha.empty()) alpha_opt.Step(alpha);
  store.ZeroGrad(Group::kTheta);
  return {lt, la};
}

double MeanSearchableEntropy(const ArchWeights& arch) {
  double sum = 0;
  int n = 0;
  auto add = [&](const HyperedgeWeights& e) {
    if (e.candidates.size() < 2) return;
    sum += Entropy(SoftmaxValues(e.alpha));
    ++n;
  };
  for (const auto& e : arch.rep) add(e);
  add(arch.score);
  return n ? sum / n : 0.0;
}

json SearchEpochToJson(const SearchEpoch& e) {
  json softmax = json::object(), entropy = json::object();
  auto add = [&](const HyperedgeWeights& w) {
    const auto p = SoftmaxValues(w.alpha);
    softmax[w.name] = p;
    entropy[w.name] = Entropy(p);
  };
  for (const auto& w : e.arch.rep) add(w);
  add(e.arch.score);
  json j;
  j["epoch"] = e.epoch;
  j["loss_theta"] = e.loss_theta;
  j["loss_alpha"] = e.loss_alpha;
  j["softmax"] = softmax;
  j["entropy"] = entropy;
  j["mean_entropy"] = MeanSearchableEntropy(e.arch);
  return j;
}

template <typename T>
SearchResult RunSearch(KgeNetwork<T>& model, const TripleStore& store,
                       const SearchConfig& config, const SearchOptions& options) {
  const Split alpha_split =
      config.alpha_source == AlphaSource::kValid ? Split::kValid : Split::kTrain;
  const auto& train = store.split(Split::kTrain);
  const auto& alpha_pool = store.split(alpha_split);
  if (train.empty()) throw DataError("search: train split is empty");
  if (alpha_pool.empty()) {
    throw DataError("search: " + SplitName(alpha_split) +
                    " split is empty but alpha_source is " +
                    AlphaSourceName(config.alpha_source));
  }
  BatchSampler train_sampler(store, Split::kTrain,
                             std::min<int64_t>(config.batch_size, train.size()),
                             config.n_neg, config.seed ^ 0x9E3779B97F4A7C15ULL);
  BatchSampler alpha_sampler(store, alpha_split,
                             std::min<int64_t>(config.batch_size, alpha_pool.size()),
                             config.n_neg, config.seed ^ 0xC2B2AE3D27D4EB4FULL);
  auto theta_opt = Optimizer<T>::Make(config.theta_optimizer, static_cast<T>(config.lr_theta),
                                      static_cast<T>(config.l2));
  auto alpha_opt = Optimizer<T>::Make(config.alpha_optimizer, static_cast<T>(config.lr_alpha));

  SearchResult result;
  result.initial_mean_entropy = MeanSearchableEntropy(model.Arch());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double sum_t = 0, sum_a = 0;
    int64_t steps = 0;
    for (const Batch& batch : train_sampler.NextEpoch()) {
      const auto [lt, la] = SearchStep(model, theta_opt, alpha_opt, batch, alpha_sampler.Next());
      sum_t += lt;
      sum_a += la;
      ++steps;
    }
    SearchEpoch rec;
    rec.epoch = epoch;
    rec.loss_theta = sum_t / static_cast<double>(steps);
    rec.loss_alpha = sum_a / static_cast<double>(steps);
    rec.arch = model.Arch();
    if (options.log) {
      *options.log << SearchEpochToJson(rec).dump() << "\n";
      options.log->flush();
    }
    result.log.push_back(std::move(rec));
  }
  result.arch = model.Arch();
  if (options.checkpoint) {
    auto meta = options.checkpoint_meta;
    meta["model"] = ModelConfigToJson(model.config()).dump();
    meta["search_space"] = SearchSpaceToJson(model.space()).dump();
    SaveCheckpoint(*options.checkpoint, model.params(), meta);
  }
  return result;
}

Genotype DeriveFromCheckpoint(const std::filesystem::path& path,
                              std::vector<std::string>* ties) {
  const Checkpoint ckpt = ReadCheckpoint(path);
  auto m = ckpt.meta.find("model");
  auto s = ckpt.meta.find("search_space");
  if (m == ckpt.meta.end() || s == ckpt.meta.end()) {
    throw Error(path.string() + " is not a search checkpoint (missing model/search_space meta)");
  }
  const ModelConfig cfg = ModelConfigFromJson(json::parse(m->second));
  const SearchSpace space = SearchSpaceFromJson(json::parse(s->second));
  auto edge = [&](const std::string& name, std::vector<std::string> candidates) {
    HyperedgeWeights w;
    w.name = name;
    w.candidates = std::move(candidates);
    if (const auto* e = ckpt.Find(AlphaParamName(name))) {
      w.alpha = ckpt.ValuesAsDouble(*e);
    } else {
      w.alpha.assign(w.candidates.size(), 0.0);
    }
    if (w.alpha.size() != w.candidates.size()) {
      throw Error("checkpoint logits for '" + name + "' do not match its candidates");
    }
    return w;
  };
  ArchWeights arch;
  for (int l = 0; l < space.n_layers(); ++l) {
    for (Target t : kTargets) {
      std::vector<std::string> names;
      for (OperatorKind k : space.rep[l][static_cast<int>(t)]) names.push_back(OperatorName(k));
      arch.rep.push_back(edge(RepEdgeName(l, t), std::move(names)));
    }
  }
  std::vector<std::string> names;
  for (ScoreFnKind k : space.score) names.push_back(ScoreFnName(k));
  arch.score = edge(kScoreEdgeName, std::move(names));
  return Derive(arch, cfg, ties);
}

template std::pair<double, double> SearchStep(KgeNetwork<float>&, Optimizer<float>&,
                                              Optimizer<float>&, const Batch&, const Batch&);
template std::pair<double, double> SearchStep(KgeNetwork<double>&, Optimizer<double>&,
                                              Optimizer<double>&, const Batch&, const Batch&);
template SearchResult RunSearch(KgeNetwork<float>&, const TripleStore&, const SearchConfig&,
                                const SearchOptions&);
template SearchResult RunSearch(KgeNetwork<double>&, const TripleStore&, const SearchConfig&,
                                const SearchOptions&);

}  // namespace nase
