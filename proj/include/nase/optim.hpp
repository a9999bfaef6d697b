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

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nase/tensor.hpp"

namespace nase {

// Model weights (theta) versus architecture weights (alpha).
enum class Group { kTheta, kAlpha };

template <typename T>
struct Parameter {
  std::string name;
  Group group = Group::kTheta;
  Tensor<T> tensor;
};

// Ordered registry of named parameters. Registration order is stable and
// defines checkpoint layout.
template <typename T>
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  Tensor<T> Add(const std::string& name, Shape shape, std::vector<T> init,
                Group group = Group::kTheta);
  Tensor<T> AddZeros(const std::string& name, Shape shape,
                     Group group = Group::kTheta);
  Tensor<T> AddUniform(const std::string& name, Shape shape, T bound,
                       std::mt19937_64& rng, Group group = Group::kTheta);

  bool Contains(const std::string& name) const;
  Parameter<T>& Get(const std::string& name);
  const Parameter<T>& Get(const std::string& name) const;

  const std::vector<std::unique_ptr<Parameter<T>>>& all() const { return params_; }
  std::vector<Parameter<T>*> GroupMembers(Group group) const;
  int64_t CountElements(Group group) const;

  void ZeroGrad(Group group);

 private:
  std::vector<std::unique_ptr<Parameter<T>>> params_;
  std::map<std::string, size_t> index_;
};

// Uniform draw in [-bound, bound] from the store's engine; kept separate so
// initializers are reproducible without std distributions' unspecified
// algorithms.
template <typename T>
T UniformSymmetric(std::mt19937_64& rng, T bound);

template <typename T>
class Sgd {
 public:
  explicit Sgd(T lr, T weight_decay = 0) : lr_(lr), weight_decay_(weight_decay) {}
  // p <- p - lr * grad, then grads of the group are zeroed.
  void Step(const std::vector<Parameter<T>*>& params);
  void set_lr(T lr) { lr_ = lr; }

 private:
  T lr_;
  T weight_decay_;
};

template <typename T>
class Adam {
 public:
  // weight_decay adds an L2 term to the gradient before the moment updates.
  explicit Adam(T lr, T weight_decay = 0, T beta1 = 0.9, T beta2 = 0.999, T eps = 1e-8)
      : lr_(lr), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void Step(const std::vector<Parameter<T>*>& params);

 private:
  struct Moments {
    std::vector<T> m, v;
    int64_t steps = 0;
  };
  T lr_, weight_decay_, beta1_, beta2_, eps_;
  std::map<std::string, Moments> state_;
};

// Either optimizer behind one interface for the group-wise training loops.
template <typename T>
class Optimizer {
 public:
  static Optimizer MakeSgd(T lr, T weight_decay = 0);
  static Optimizer MakeAdam(T lr, T weight_decay = 0);
  static Optimizer Make(const std::string& kind, T lr, T weight_decay = 0);
  void Step(const std::vector<Parameter<T>*>& params);

 private:
  std::unique_ptr<Sgd<T>> sgd_;
  std::unique_ptr<Adam<T>> adam_;
};

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;
extern template class Sgd<float>;
extern template class Sgd<double>;
extern template class Adam<float>;
extern template class Adam<double>;
extern template class Optimizer<float>;
extern template class Optimizer<double>;

}  // namespace nase
