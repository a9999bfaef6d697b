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

#include "nase/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace nase {

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t e : shape) n *= e;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

namespace {

std::string ShapeErrorMessage(const std::string& primitive,
                              const std::vector<Shape>& shapes,
                              const std::string& detail) {
  std::ostringstream os;
  os << primitive << ": shape mismatch";
  for (size_t i = 0; i < shapes.size(); ++i) {
    os << (i ? " vs " : " ") << ShapeString(shapes[i]);
  }
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

}  // namespace

ShapeError::ShapeError(const std::string& primitive,
                       const std::vector<Shape>& shapes,
                       const std::string& detail)
    : Error(ShapeErrorMessage(primitive, shapes, detail)),
      primitive_(primitive) {}

std::string PrecisionName(Precision p) {
  return p == Precision::kF32 ? "f32" : "f64";
}

Precision ParsePrecision(const std::string& name) {
  if (name == "f32") return Precision::kF32;
  if (name == "f64") return Precision::kF64;
  throw Error("unknown element precision '" + name + "' (expected f32|f64)");
}

template <typename T>
Tensor<T> Tensor<T>::Constant(Shape shape, std::vector<T> values) {
  for (int64_t e : shape) {
    if (e <= 0) throw ShapeError("constant", {shape}, "extents must be positive");
  }
  if (NumElements(shape) != static_cast<int64_t>(values.size())) {
    throw ShapeError("constant", {shape},
                     "got " + std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::Zeros(Shape shape) {
  const auto n = NumElements(shape);
  return Constant(std::move(shape), std::vector<T>(n, T(0)));
}

template <typename T>
Tensor<T> Tensor<T>::Variable(Shape shape, std::vector<T> values) {
  Tensor t = Constant(std::move(shape), std::move(values));
  t.node_->requires_grad = true;
  t.node_->EnsureGrad();
  return t;
}

template <typename T>
int64_t Tensor<T>::dim(int i) const {
  const auto r = rank();
  const int64_t k = i < 0 ? r + i : i;
  if (k < 0 || k >= r) throw Error("dim index out of range");
  return node_->shape[k];
}

template <typename T>
void Tensor<T>::ZeroGrad() {
  if (node_->requires_grad) {
    node_->grad.assign(node_->value.size(), T(0));
  } else {
    node_->grad.clear();
  }
}

template <typename T>
T Tensor<T>::item() const {
  if (node_->value.size() != 1) {
    throw ShapeError("item", {node_->shape}, "expected a single element");
  }
  return node_->value[0];
}

template <typename T>
Tensor<T> MakeResult(Shape shape, std::vector<T> value,
                     const std::vector<Tensor<T>>& inputs,
                     std::function<void(Node<T>&)> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->is_leaf = false;
  for (const auto& in : inputs) {
    if (in.requires_grad()) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->parents.reserve(inputs.size());
    for (const auto& in : inputs) node->parents.push_back(in.node());
    node->backward = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

template class Tensor<float>;
template class Tensor<double>;
template Tensor<float> MakeResult(Shape, std::vector<float>,
                                  const std::vector<Tensor<float>>&,
                                  std::function<void(Node<float>&)>);
template Tensor<double> MakeResult(Shape, std::vector<double>,
                                   const std::vector<Tensor<double>>&,
                                   std::function<void(Node<double>&)>);

}  // namespace nase
