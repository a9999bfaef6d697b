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

#include "nase/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace nase {

template <typename T>
void Backward(const Tensor<T>& loss) {
  if (loss.numel() != 1) {
    throw ShapeError("backward", {loss.shape()}, "loss must be scalar");
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<T>* n : order) {
    if (!n->is_leaf) n->grad.assign(n->value.size(), T(0));
  }
  Node<T>* root = loss.node().get();
  root->EnsureGrad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward) n->backward(*n);
  }
}

template void Backward(const Tensor<float>&);
template void Backward(const Tensor<double>&);

GradCheckResult GradCheck(
    const std::function<Tensor<double>(const Tensor<double>&)>& fn,
    const Tensor<double>& input, double eps) {
  std::vector<double> x0(input.data().begin(), input.data().end());
  auto eval = [&](const std::vector<double>& x) {
    Tensor<double> out = fn(Tensor<double>::Constant(input.shape(), x));
    if (out.numel() != 1) {
      throw ShapeError("grad_check", {out.shape()}, "function must be scalar");
    }
    return out.item();
  };

  Tensor<double> var = Tensor<double>::Variable(input.shape(), x0);
  Tensor<double> out = fn(var);
  if (out.numel() != 1) {
    throw ShapeError("grad_check", {out.shape()}, "function must be scalar");
  }
  Backward(out);
  const double f0 = out.item();
  const auto analytic = var.grad();

  GradCheckResult result;
  std::vector<double> x = x0;
  for (size_t i = 0; i < x0.size(); ++i) {
    x[i] = x0[i] + eps;
    const double fp = eval(x);
    x[i] = x0[i] - eps;
    const double fm = eval(x);
    x[i] = x0[i];
    const double numeric = (fp - fm) / (2 * eps);
    const double a = analytic[i];
    const double err =
        std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
    result.max_rel_error = std::max(result.max_rel_error, err);

    const double forward = (fp - f0) / eps;
    const double backward = (f0 - fm) / eps;
    const double scale = std::max({1.0, std::abs(forward), std::abs(backward)});
    if (std::abs(forward - backward) / scale > 1e-2) {
      ++result.nonsmooth_coordinates;
    }
  }
  return result;
}

GradCheckResult GradCheckLeaves(const std::function<Tensor<double>()>& fn,
                                const std::vector<Tensor<double>>& leaves, double eps) {
  auto eval = [&] {
    Tensor<double> out = fn();
    if (out.numel() != 1) {
      throw ShapeError("grad_check", {out.shape()}, "function must be scalar");
    }
    return out;
  };
  std::vector<Tensor<double>> params = leaves;
  for (auto& p : params) p.ZeroGrad();
  Tensor<double> out = eval();
  Backward(out);
  const double f0 = out.item();

  GradCheckResult result;
  for (auto& p : params) {
    const std::vector<double> analytic(p.grad().begin(), p.grad().end());
    auto x = p.mutable_data();
    for (size_t i = 0; i < x.size(); ++i) {
      const double x0 = x[i];
      x[i] = x0 + eps;
      const double fp = eval().item();
      x[i] = x0 - eps;
      const double fm = eval().item();
      x[i] = x0;
      const double numeric = (fp - fm) / (2 * eps);
      const double a = analytic.empty() ? 0.0 : analytic[i];
      result.max_rel_error = std::max(
          result.max_rel_error,
          std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)}));
      const double forward = (fp - f0) / eps;
      const double backward = (f0 - fm) / eps;
      const double scale = std::max({1.0, std::abs(forward), std::abs(backward)});
      if (std::abs(forward - backward) / scale > 1e-2) ++result.nonsmooth_coordinates;
    }
    p.ZeroGrad();
  }
  return result;
}

}  // namespace nase
