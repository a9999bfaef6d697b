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

#include "nase/optim.hpp"

#include <cmath>

namespace nase {

template <typename T>
T UniformSymmetric(std::mt19937_64& rng, T bound) {
  // 53 random bits mapped to [0, 1).
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return static_cast<T>((2.0 * u - 1.0) * static_cast<double>(bound));
}

template <typename T>
Tensor<T> ParameterStore<T>::Add(const std::string& name, Shape shape,
                                 std::vector<T> init, Group group) {
  if (index_.count(name)) throw Error("duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter<T>>();
  p->name = name;
  p->group = group;
  p->tensor = Tensor<T>::Variable(std::move(shape), std::move(init));
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return params_.back()->tensor;
}

template <typename T>
Tensor<T> ParameterStore<T>::AddZeros(const std::string& name, Shape shape,
                                      Group group) {
  const auto n = NumElements(shape);
  return Add(name, std::move(shape), std::vector<T>(n, T(0)), group);
}

template <typename T>
Tensor<T> ParameterStore<T>::AddUniform(const std::string& name, Shape shape,
                                        T bound, std::mt19937_64& rng,
                                        Group group) {
  std::vector<T> init(NumElements(shape));
  for (auto& v : init) v = UniformSymmetric(rng, bound);
  return Add(name, std::move(shape), std::move(init), group);
}

template <typename T>
bool ParameterStore<T>::Contains(const std::string& name) const {
  return index_.count(name) != 0;
}

template <typename T>
Parameter<T>& ParameterStore<T>::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
  return *params_[it->second];
}

template <typename T>
const Parameter<T>& ParameterStore<T>::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
  return *params_[it->second];
}

template <typename T>
std::vector<Parameter<T>*> ParameterStore<T>::GroupMembers(Group group) const {
  std::vector<Parameter<T>*> out;
  for (const auto& p : params_) {
    if (p->group == group) out.push_back(p.get());
  }
  return out;
}

template <typename T>
int64_t ParameterStore<T>::CountElements(Group group) const {
  int64_t n = 0;
  for (const auto& p : params_) {
    if (p->group == group) n += p->tensor.numel();
  }
  return n;
}

template <typename T>
void ParameterStore<T>::ZeroGrad(Group group) {
  for (auto& p : params_) {
    if (p->group == group) p->tensor.ZeroGrad();
  }
}

namespace {

template <typename T>
void RequireGrad(const Parameter<T>& p) {
  if (!p.tensor.has_grad()) {
    throw Error("optimizer: parameter '" + p.name + "' has no gradient");
  }
}

}  // namespace

template <typename T>
void Sgd<T>::Step(const std::vector<Parameter<T>*>& params) {
  for (auto* p : params) RequireGrad(*p);
  for (auto* p : params) {
    auto value = p->tensor.mutable_data();
    auto grad = p->tensor.mutable_grad();
    for (size_t i = 0; i < value.size(); ++i) {
      value[i] -= lr_ * (grad[i] + weight_decay_ * value[i]);
      grad[i] = T(0);
    }
  }
}

template <typename T>
void Adam<T>::Step(const std::vector<Parameter<T>*>& params) {
  for (auto* p : params) RequireGrad(*p);
  for (auto* p : params) {
    auto value = p->tensor.mutable_data();
    auto grad = p->tensor.mutable_grad();
    auto& st = state_[p->name];
    if (st.m.size() != value.size()) {
      st.m.assign(value.size(), T(0));
      st.v.assign(value.size(), T(0));
      st.steps = 0;
    }
    ++st.steps;
    const T c1 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta1_), st.steps));
    const T c2 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta2_), st.steps));
    for (size_t i = 0; i < value.size(); ++i) {
      const T g = grad[i] + weight_decay_ * value[i];
      st.m[i] = beta1_ * st.m[i] + (T(1) - beta1_) * g;
      st.v[i] = beta2_ * st.v[i] + (T(1) - beta2_) * g * g;
      const T mhat = st.m[i] / c1;
      const T vhat = st.v[i] / c2;
      value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      grad[i] = T(0);
    }
  }
}

template <typename T>
Optimizer<T> Optimizer<T>::MakeSgd(T lr, T weight_decay) {
  Optimizer o;
  o.sgd_ = std::make_unique<Sgd<T>>(lr, weight_decay);
  return o;
}

template <typename T>
Optimizer<T> Optimizer<T>::MakeAdam(T lr, T weight_decay) {
  Optimizer o;
  o.adam_ = std::make_unique<Adam<T>>(lr, weight_decay);
  return o;
}

template <typename T>
Optimizer<T> Optimizer<T>::Make(const std::string& kind, T lr, T weight_decay) {
  if (kind == "sgd") return MakeSgd(lr, weight_decay);
  if (kind == "adam") return MakeAdam(lr, weight_decay);
  throw Error("unknown optimizer '" + kind + "' (expected sgd|adam)");
}

template <typename T>
void Optimizer<T>::Step(const std::vector<Parameter<T>*>& params) {
  if (sgd_) {
    sgd_->Step(params);
  } else {
    adam_->Step(params);
  }
}

template float UniformSymmetric(std::mt19937_64&, float);
template double UniformSymmetric(std::mt19937_64&, double);
template class ParameterStore<float>;
template class ParameterStore<double>;
template class Sgd<float>;
template class Sgd<double>;
template class Adam<float>;
template class Adam<double>;
template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace nase
