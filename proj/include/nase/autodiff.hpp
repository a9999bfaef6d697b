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

#include <functional>
#include <vector>

#include "nase/tensor.hpp"

namespace nase {

// Reverse sweep from a scalar loss. Leaf grads accumulate across calls;
// intermediate grads are reset at the start of every sweep.
template <typename T>
void Backward(const Tensor<T>& loss);

struct GradCheckResult {
  double max_rel_error = 0.0;
  // Coordinates where one-sided difference quotients disagree, i.e. the
  // function has a kink there and the analytic value is a subgradient.
  int nonsmooth_coordinates = 0;
};

// Compares Backward against central differences with step `eps`. The error
// per coordinate is |a - n| / max(1, |a|, |n|).
GradCheckResult GradCheck(
    const std::function<Tensor<double>(const Tensor<double>&)>& fn,
    const Tensor<double>& input, double eps = 1e-5);

// Same measure over existing leaf tensors (e.g. model parameters), which are
// perturbed in place and restored. `fn` rebuilds the graph on every call.
GradCheckResult GradCheckLeaves(const std::function<Tensor<double>()>& fn,
                                const std::vector<Tensor<double>>& leaves,
                                double eps = 1e-5);

}  // namespace nase
