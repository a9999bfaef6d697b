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
#include <string>
#include <vector>

#include "nase/tensor.hpp"

// Differentiable primitives. There is no implicit broadcasting: every
// primitive documents its exact shape rule and raises ShapeError otherwise.
// A leading batch axis is threaded through the model-facing primitives.
namespace nase::ops {

enum class Padding { kSame, kValid };

// (m, k) x (k, n) -> (m, n)
template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise on identical shapes.
template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b);

// scale * x + shift with constant scale/shift.
template <typename T>
Tensor<T> Affine(const Tensor<T>& x, T scale, T shift);

// (m, n) + (n) -> (m, n)
template <typename T>
Tensor<T> AddBias(const Tensor<T>& x, const Tensor<T>& bias);

// (m, n) * (m) -> (m, n); row i scaled by s[i]. s may also be (m, 1).
template <typename T>
Tensor<T> ScaleRows(const Tensor<T>& x, const Tensor<T>& s);

// x * s with s of shape (1).
template <typename T>
Tensor<T> Scale(const Tensor<T>& x, const Tensor<T>& s);

// Element i of a rank-1 tensor, shape (1).
template <typename T>
Tensor<T> Pick(const Tensor<T>& x, int64_t i);

// Concatenation along `axis`; all other extents must agree.
template <typename T>
Tensor<T> Concat(const std::vector<Tensor<T>>& xs, int64_t axis);

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape);

template <typename T>
Tensor<T> Relu(const Tensor<T>& x);
template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x);

// Softmax over the last axis.
template <typename T>
Tensor<T> Softmax(const Tensor<T>& x);

// x: (B, C, L), w: (F, C, k), bias: (F) -> (B, F, L). Cross-correlation with
// k-1 zeros of padding split as ceil((k-1)/2) on the left, the rest on the
// right, so even kernels carry the extra zero on the left.
template <typename T>
Tensor<T> Conv1dSame(const Tensor<T>& x, const Tensor<T>& w,
                     const Tensor<T>& bias);

// x: (B, C, H, W), w: (F, C, kh, kw), bias: (F) -> (B, F, H', W') with H'
// and W' determined per axis by `pad_h` / `pad_w`.
template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias,
                 Padding pad_h, Padding pad_w);

template <typename T>
Tensor<T> Conv2dSame(const Tensor<T>& x, const Tensor<T>& w,
                     const Tensor<T>& bias) {
  return Conv2d(x, w, bias, Padding::kSame, Padding::kSame);
}

// (..., d) -> (...) p-norm over the last axis, p in {1, 2}. Subgradient 0 is
// used at the kinks (zero coordinates for p = 1, the origin for p = 2).
template <typename T>
Tensor<T> PNorm(const Tensor<T>& x, int p);

// Reductions to shape (1).
template <typename T>
Tensor<T> Sum(const Tensor<T>& x);
template <typename T>
Tensor<T> Mean(const Tensor<T>& x);

// (..., d) -> (...)
template <typename T>
Tensor<T> SumLastAxis(const Tensor<T>& x);

// table: (N, d), rows -> (len(rows), d)
template <typename T>
Tensor<T> Gather(const Tensor<T>& table, const std::vector<int64_t>& rows);

// (B, n, n) x (B, n) -> (B, n)
template <typename T>
Tensor<T> BatchedMatVec(const Tensor<T>& mats, const Tensor<T>& vecs);

// Mean binary cross-entropy of logits against constant 0/1 labels, in the
// log-sum-exp form. Shape (1).
template <typename T>
Tensor<T> BceWithLogits(const Tensor<T>& logits, const std::vector<T>& labels);

// Dynamic dispatch by primitive name.
struct Attrs {
  std::map<std::string, double> scalars;
  std::map<std::string, Shape> shapes;
  std::vector<int64_t> indices;
  std::vector<double> labels;
};

std::vector<std::string> PrimitiveNames();

template <typename T>
Tensor<T> ApplyPrimitive(const std::string& kind,
                         const std::vector<Tensor<T>>& inputs,
                         const Attrs& attrs = {});

}  // namespace nase::ops
