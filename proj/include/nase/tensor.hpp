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

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nase {

using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  ShapeError(const std::string& primitive, const std::vector<Shape>& shapes,
             const std::string& detail = "");
  const std::string& primitive() const { return primitive_; }

 private:
  std::string primitive_;
};

// Element precision of a model instance.
enum class Precision { kF32, kF64 };

std::string PrecisionName(Precision p);
Precision ParsePrecision(const std::string& name);

template <typename T>
struct PrecisionOf;
template <>
struct PrecisionOf<float> {
  static constexpr Precision value = Precision::kF32;
};
template <>
struct PrecisionOf<double> {
  static constexpr Precision value = Precision::kF64;
};

// One vertex of the define-by-run differentiation graph. `backward` reads
// this node's grad and accumulates into the parents' grads.
template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
  bool requires_grad = false;
  bool is_leaf = true;

  std::vector<T>& EnsureGrad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad;
  }
};

template <typename T>
class Tensor {
 public:
  using Scalar = T;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Tensor Constant(Shape shape, std::vector<T> values);
  static Tensor Zeros(Shape shape);
  static Tensor Scalar1(T value) { return Constant({1}, {value}); }
  // A leaf that collects gradients (a parameter or a grad-check input).
  static Tensor Variable(Shape shape, std::vector<T> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t dim(int i) const;
  int64_t rank() const { return static_cast<int64_t>(node_->shape.size()); }
  int64_t numel() const { return static_cast<int64_t>(node_->value.size()); }

  std::span<const T> data() const { return node_->value; }
  // Direct writes are for optimizers and initializers only; never mutate a
  // tensor that is part of a live tape.
  std::span<T> mutable_data() { return node_->value; }

  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->EnsureGrad(); }
  void ZeroGrad();

  bool requires_grad() const { return node_->requires_grad; }
  T item() const;

  const std::shared_ptr<Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

// Builds a non-leaf tensor wired to `inputs`. The closure receives the new
// node and must accumulate into the inputs' grads.
template <typename T>
Tensor<T> MakeResult(Shape shape, std::vector<T> value,
                     const std::vector<Tensor<T>>& inputs,
                     std::function<void(Node<T>&)> backward);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace nase
