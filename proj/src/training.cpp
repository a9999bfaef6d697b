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

#include "nase/training.hpp"

#include <chrono>
#include <cmath>

#include "nase/autodiff.hpp"
#include "nase/checkpoint.hpp"
#include "nase/ops.hpp"

namespace nase {

template <typename T>
Tensor<T> BceLoss(const Tensor<T>& scores, const std::vector<double>& labels) {
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw Error("bce_loss: labels must be 0 or 1");
  }
  return ops::BceWithLogits(scores, std::vector<T>(labels.begin(), labels.end()));
}

void TrainConfig::Validate() const {
  if (dim < 1) throw Error("dim must be positive");
  if (n_layers < 1 || n_layers > 4) throw Error("n_layers must be in {1, 2, 3, 4}");
  if (batch_size < 1) throw Error("batch_size must be >= 1");
  if (n_neg < 1) throw Error("n_neg must be >= 1");
  if (epochs < 0) throw Error("epochs must be >= 0");
  if (p_norm != 1 && p_norm != 2) throw Error("p_norm must be 1 or 2");
  if (valid_every < 1) throw Error("valid_every must be >= 1");
  if (patience < 0) throw Error("patience must be >= 0");
}

nlohmann::json FitEpochToJson(const FitEpoch& e, bool with_wall_time) {
  nlohmann::json j;
  j["epoch"] = e.epoch;
  j["train_loss"] = e.train_loss;
  j["valid_mrr"] = e.valid_mrr ? nlohmann::json(*e.valid_mrr) : nlohmann::json(nullptr);
  if (with_wall_time) j["wall_time"] = e.wall_time;
  return j;
}

ModelConfig ModelConfigForGenotype(const Genotype& g, const TripleStore& store,
                                   int p_norm, const ModelExtras& extras) {
  ModelConfig m;
  m.num_entities = store.num_entities();
  m.num_relations = store.num_relations();
  m.dim = g.dim;
  m.n_layers = g.n_layers;
  m.reshape = g.reshape;
  m.conv_filters = g.conv_filters;
  m.conv_score_filters = g.conv_score_filters;
  m.mlp_hidden = g.mlp_hidden;
  m.p_norm = p_norm;
  m.fusion = extras.fusion;
  m.per_relation_translation = extras.per_relation_translation;
  return m;
}

namespace {

template <typename T>
std::vector<std::vector<T>> Snapshot(const ParameterStore<T>& store) {
  std::vector<std::vector<T>> out;
  for (const auto& p : store.all()) {
    out.emplace_back(p->tensor.data().begin(), p->tensor.data().end());
  }
  return out;
}

template <typename T>
void Restore(ParameterStore<T>& store, const std::vector<std::vector<T>>& snap) {
  for (size_t i = 0; i < snap.size(); ++i) {
    auto dst = store.all()[i]->tensor.mutable_data();
    std::copy(snap[i].begin(), snap[i].end(), dst.begin());
  }
}

}  // namespace

template <typename T>
FitResult<T> Fit(const Genotype& genotype, const TripleStore& store,
                 const TrainConfig& config, const ModelExtras& extras,
                 const FitOptions& options) {
  config.Validate();
  genotype.Validate();
  if (genotype.dim != config.dim) {
    throw Error("genotype dim " + std::to_string(genotype.dim) +
                " conflicts with config dim " + std::to_string(config.dim));
  }
  const ModelConfig mcfg = ModelConfigForGenotype(genotype, store, config.p_norm, extras);

  FitResult<T> result;
  result.model = std::make_unique<KgeNetwork<T>>(mcfg, SearchSpace::FromGenotype(genotype),
                                                 config.seed);
  auto& model = *result.model;
  const auto theta = model.params().GroupMembers(Group::kTheta);
  auto optimizer =
      Optimizer<T>::Make(config.optimizer, static_cast<T>(config.lr), static_cast<T>(config.l2));

  const auto& train = store.split(Split::kTrain);
  BatchSampler sampler(store, Split::kTrain,
                       std::min<int64_t>(config.batch_size, static_cast<int64_t>(train.size())),
                       config.n_neg, config.seed ^ 0x9E3779B97F4A7C15ULL);
  const bool validate = !store.split(Split::kValid).empty();
  EvalOptions eval;
  eval.split = Split::kValid;
  eval.tie_policy = config.tie_policy;
  eval.threads = config.threads;

  std::vector<std::vector<T>> best = Snapshot(model.params());
  int since_best = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0;
    int64_t batches = 0;
    for (const Batch& batch : sampler.NextEpoch()) {
      auto loss = BceLoss(model.Forward(batch.heads, batch.rels, batch.tails), batch.labels);
      const double value = static_cast<double>(loss.item());
      if (!std::isfinite(value)) {
        throw NonFiniteLossError("non-finite training loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batches));
      }
      Backward(loss);
      optimizer.Step(theta);
      loss_sum += value;
      ++batches;
    }
    FitEpoch rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(std::max<int64_t>(1, batches));
    if (validate && (epoch % config.valid_every == 0 || epoch == config.epochs)) {
      rec.valid_mrr = Evaluate(MakeNetworkScorer(model), store, eval).mrr;
      if (!result.best_valid_mrr || *rec.valid_mrr > *result.best_valid_mrr) {
        result.best_valid_mrr = rec.valid_mrr;
        result.best_epoch = epoch;
        best = Snapshot(model.params());
        since_best = 0;
      } else {
        ++since_best;
      }
    }
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(rec);
    if (options.log) {
      *options.log << FitEpochToJson(rec, config.log_wall_time).dump() << "\n";
      options.log->flush();
    }
    if (config.patience > 0 && since_best >= config.patience) break;
  }
  if (validate && result.best_valid_mrr) {
    Restore(model.params(), best);
  } else {
    result.best_epoch = static_cast<int>(result.log.size());
  }
  if (options.checkpoint) SaveModel(*options.checkpoint, model, genotype);
  return result;
}

template <typename T>
void SaveModel(const std::filesystem::path& path, const KgeNetwork<T>& model,
               const Genotype& genotype) {
  SaveCheckpoint(path, model.params(),
                 {{"genotype", GenotypeToJson(genotype).dump()},
                  {"model", ModelConfigToJson(model.config()).dump()}});
}

LoadedModelInfo ReadModelInfo(const std::filesystem::path& path) {
  const Checkpoint ckpt = ReadCheckpoint(path);
  auto g = ckpt.meta.find("genotype");
  auto m = ckpt.meta.find("model");
  if (g == ckpt.meta.end() || m == ckpt.meta.end()) {
    throw Error(path.string() + " is not a model checkpoint (missing genotype/model meta)");
  }
  return {GenotypeFromJson(nlohmann::json::parse(g->second)),
          ModelConfigFromJson(nlohmann::json::parse(m->second)), ckpt.precision};
}

template <typename T>
std::unique_ptr<KgeNetwork<T>> LoadModel(const std::filesystem::path& path) {
  const Checkpoint ckpt = ReadCheckpoint(path);
  const LoadedModelInfo info = ReadModelInfo(path);
  auto model = std::make_unique<KgeNetwork<T>>(info.model,
                                               SearchSpace::FromGenotype(info.genotype), 0);
  RestoreParameters(ckpt, model->params());
  return model;
}

#define NASE_INSTANTIATE_TRAINING(T)                                                    \
  template Tensor<T> BceLoss(const Tensor<T>&, const std::vector<double>&);             \
  template FitResult<T> Fit(const Genotype&, const TripleStore&, const TrainConfig&,    \
                            const ModelExtras&, const FitOptions&);                     \
  template void SaveModel(const std::filesystem::path&, const KgeNetwork<T>&,           \
                          const Genotype&);                                             \
  template std::unique_ptr<KgeNetwork<T>> LoadModel(const std::filesystem::path&);

NASE_INSTANTIATE_TRAINING(float)
NASE_INSTANTIATE_TRAINING(double)

#undef NASE_INSTANTIATE_TRAINING

}  // namespace nase
