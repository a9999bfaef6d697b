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

#include "nase/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace nase::ops {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

// Grad buffer of a parent, or nullptr when the parent takes no gradient.
template <typename T>
T* GradOf(Node<T>& self, size_t i) {
  auto& p = *self.parents[i];
  if (!p.requires_grad) return nullptr;
  return p.EnsureGrad().data();
}

template <typename T>
void RequireSameShape(const char* prim, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) throw ShapeError(prim, {a.shape(), b.shape()});
}

template <typename T>
void RequireRank(const char* prim, const Tensor<T>& x, int64_t rank) {
  if (x.rank() != rank) {
    throw ShapeError(prim, {x.shape()}, "expected rank " + std::to_string(rank));
  }
}

// Zero padding split with the extra element on the left for even kernels.
int64_t SameLeftPad(int64_t k) {
  const int64_t total = k - 1;
  return total - total / 2;
}

struct ConvGeometry {
  int64_t batch, channels, height, width;
  int64_t filters, kh, kw;
  int64_t pad_top, pad_left;
  int64_t out_h, out_w;

  int64_t patch() const { return channels * kh * kw; }
  int64_t out_plane() const { return out_h * out_w; }
  int64_t columns() const { return batch * out_plane(); }
};

template <typename T>
void Im2Col(const ConvGeometry& g, const T* x, T* cols) {
  const int64_t ncols = g.columns();
  for (int64_t c = 0; c < g.channels; ++c) {
    for (int64_t i = 0; i < g.kh; ++i) {
      for (int64_t j = 0; j < g.kw; ++j) {
        T* row = cols + ((c * g.kh + i) * g.kw + j) * ncols;
        for (int64_t b = 0; b < g.batch; ++b) {
          const T* plane = x + (b * g.channels + c) * g.height * g.width;
          T* dst = row + b * g.out_plane();
          for (int64_t y = 0; y < g.out_h; ++y) {
            const int64_t sy = y + i - g.pad_top;
            for (int64_t xo = 0; xo < g.out_w; ++xo) {
              const int64_t sx = xo + j - g.pad_left;
              const bool inside =
                  sy >= 0 && sy < g.height && sx >= 0 && sx < g.width;
              dst[y * g.out_w + xo] = inside ? plane[sy * g.width + sx] : T(0);
            }
          }
        }
      }
    }
  }
}

template <typename T>
void Col2ImAdd(const ConvGeometry& g, const T* cols, T* dx) {
  const int64_t ncols = g.columns();
  for (int64_t c = 0; c < g.channels; ++c) {
    for (int64_t i = 0; i < g.kh; ++i) {
      for (int64_t j = 0; j < g.kw; ++j) {
        const T* row = cols + ((c * g.kh + i) * g.kw + j) * ncols;
        for (int64_t b = 0; b < g.batch; ++b) {
          T* plane = dx + (b * g.channels + c) * g.height * g.width;
          const T* src = row + b * g.out_plane();
          for (int64_t y = 0; y < g.out_h; ++y) {
            const int64_t sy = y + i - g.pad_top;
            if (sy < 0 || sy >= g.height) continue;
            for (int64_t xo = 0; xo < g.out_w; ++xo) {
              const int64_t sx = xo + j - g.pad_left;
              if (sx < 0 || sx >= g.width) continue;
              plane[sy * g.width + sx] += src[y * g.out_w + xo];
            }
          }
        }
      }
    }
  }
}

// Shared kernel for the 1-D and 2-D convolutions. x is (B, C, H, W) in
// memory, w is (F, C, kh, kw), output (B, F, out_h, out_w).
template <typename T>
Tensor<T> ConvCore(const char* prim, const ConvGeometry& g, Shape out_shape,
                   const Tensor<T>& x, const Tensor<T>& w,
                   const Tensor<T>& bias) {
  auto cols = std::make_shared<std::vector<T>>(g.patch() * g.columns());
  Im2Col(g, x.data().data(), cols->data());

  ConstMatMap<T> wmat(w.data().data(), g.filters, g.patch());
  ConstMatMap<T> cmat(cols->data(), g.patch(), g.columns());
  RowMat<T> prod = wmat * cmat;  // (F, B * plane)

  std::vector<T> out(g.batch * g.filters * g.out_plane());
  const auto bdata = bias.data();
  for (int64_t b = 0; b < g.batch; ++b) {
    for (int64_t f = 0; f < g.filters; ++f) {
      const T* src = prod.data() + f * g.columns() + b * g.out_plane();
      T* dst = out.data() + (b * g.filters + f) * g.out_plane();
      for (int64_t p = 0; p < g.out_plane(); ++p) dst[p] = src[p] + bdata[f];
    }
  }
  (void)prim;
  return MakeResult<T>(
      std::move(out_shape), std::move(out), {x, w, bias},
      [g, cols](Node<T>& self) {
        // Re-layout the output grad as (F, B * plane).
        RowMat<T> dprod(g.filters, g.columns());
        for (int64_t b = 0; b < g.batch; ++b) {
          for (int64_t f = 0; f < g.filters; ++f) {
            const T* src = self.grad.data() + (b * g.filters + f) * g.out_plane();
            T* dst = dprod.data() + f * g.columns() + b * g.out_plane();
            std::copy(src, src + g.out_plane(), dst);
          }
        }
        ConstMatMap<T> cmat(cols->data(), g.patch(), g.columns());
        if (T* dw = GradOf(self, 1)) {
          MatMap<T>(dw, g.filters, g.patch()).noalias() += dprod * cmat.transpose();
        }
        if (T* db = GradOf(self, 2)) {
          for (int64_t f = 0; f < g.filters; ++f) db[f] += dprod.row(f).sum();
        }
        if (T* dx = GradOf(self, 0)) {
          const auto& wv = self.parents[1]->value;
          ConstMatMap<T> wmat(wv.data(), g.filters, g.patch());
          RowMat<T> dcols = wmat.transpose() * dprod;
          Col2ImAdd(g, dcols.data(), dx);
        }
      });
}

}  // namespace

template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul", {a.shape(), b.shape()});
  }
  const int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<T> out(m * n);
  MatMap<T>(out.data(), m, n).noalias() =
      ConstMatMap<T>(a.data().data(), m, k) * ConstMatMap<T>(b.data().data(), k, n);
  return MakeResult<T>({m, n}, std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    ConstMatMap<T> dc(self.grad.data(), m, n);
    if (T* da = GradOf(self, 0)) {
      ConstMatMap<T> bm(self.parents[1]->value.data(), k, n);
      MatMap<T>(da, m, k).noalias() += dc * bm.transpose();
    }
    if (T* db = GradOf(self, 1)) {
      ConstMatMap<T> am(self.parents[0]->value.data(), m, k);
      MatMap<T>(db, k, n).noalias() += am.transpose() * dc;
    }
  });
}

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b) {
  RequireSameShape("add", a, b);
  std::vector<T> out(a.numel());
  const auto x = a.data(), y = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return MakeResult<T>(a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    const size_t n = self.grad.size();
    for (size_t p = 0; p < 2; ++p) {
      if (T* d = GradOf(self, p)) {
        for (size_t i = 0; i < n; ++i) d[i] += self.grad[i];
      }
    }
  });
}

template <typename T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b) {
  RequireSameShape("sub", a, b);
  std::vector<T> out(a.numel());
  const auto x = a.data(), y = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return MakeResult<T>(a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    const size_t n = self.grad.size();
    if (T* d = GradOf(self, 0)) {
      for (size_t i = 0; i < n; ++i) d[i] += self.grad[i];
    }
    if (T* d = GradOf(self, 1)) {
      for (size_t i = 0; i < n; ++i) d[i] -= self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b) {
  RequireSameShape("mul", a, b);
  std::vector<T> out(a.numel());
  const auto x = a.data(), y = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return MakeResult<T>(a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    const size_t n = self.grad.size();
    const auto& x = self.parents[0]->value;
    const auto& y = self.parents[1]->value;
    if (T* d = GradOf(self, 0)) {
      for (size_t i = 0; i < n; ++i) d[i] += self.grad[i] * y[i];
    }
    if (T* d = GradOf(self, 1)) {
      for (size_t i = 0; i < n; ++i) d[i] += self.grad[i] * x[i];
    }
  });
}

template <typename T>
Tensor<T> Affine(const Tensor<T>& x, T scale, T shift) {
  std::vector<T> out(x.numel());
  const auto v = x.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = scale * v[i] + shift;
  return MakeResult<T>(x.shape(), std::move(out), {x}, [scale](Node<T>& self) {
    if (T* d = GradOf(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) d[i] += scale * self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> AddBias(const Tensor<T>& x, const Tensor<T>& bias) {
  if (x.rank() != 2 || bias.rank() != 1 || x.dim(1) != bias.dim(0)) {
    throw ShapeError("add_bias", {x.shape(), bias.shape()});
  }
  const int64_t m = x.dim(0), n = x.dim(1);
  std::vector<T> out(m * n);
  const auto v = x.data(), b = bias.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) out[i * n + j] = v[i * n + j] + b[j];
  }
  return MakeResult<T>(x.shape(), std::move(out), {x, bias}, [m, n](Node<T>& self) {
    if (T* d = GradOf(self, 0)) {
      for (int64_t i = 0; i < m * n; ++i) d[i] += self.grad[i];
    }
    if (T* d = GradOf(self, 1)) {
      for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) d[j] += self.grad[i * n + j];
      }
    }
  });
}

template <typename T>
Tensor<T> ScaleRows(const Tensor<T>& x, const Tensor<T>& s) {
  const bool ok = x.rank() == 2 && s.numel() == x.dim(0) &&
                  (s.rank() == 1 || (s.rank() == 2 && s.dim(1) == 1));
  if (!ok) throw ShapeError("scale_rows", {x.shape(), s.shape()});
  const int64_t m = x.dim(0), n = x.dim(1);
  std::vector<T> out(m * n);
  const auto v = x.data(), sv = s.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) out[i * n + j] = v[i * n + j] * sv[i];
  }
  return MakeResult<T>(x.shape(), std::move(out), {x, s}, [m, n](Node<T>& self) {
    const auto& v = self.parents[0]->value;
    const auto& sv = self.parents[1]->value;
    if (T* d = GradOf(self, 0)) {
      for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) d[i * n + j] += self.grad[i * n + j] * sv[i];
      }
    }
    if (T* d = GradOf(self, 1)) {
      for (int64_t i = 0; i < m; ++i) {
        T acc = 0;
        for (int64_t j = 0; j < n; ++j) acc += self.grad[i * n + j] * v[i * n + j];
        d[i] += acc;
      }
    }
  });
}

template <typename T>
Tensor<T> Scale(const Tensor<T>& x, const Tensor<T>& s) {
  if (s.numel() != 1) throw ShapeError("scale", {x.shape(), s.shape()});
  const T k = s.data()[0];
  std::vector<T> out(x.numel());
  const auto v = x.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = v[i] * k;
  return MakeResult<T>(x.shape(), std::move(out), {x, s}, [](Node<T>& self) {
    const auto& v = self.parents[0]->value;
    const T k = self.parents[1]->value[0];
    if (T* d = GradOf(self, 0)) {
      for (size_t i = 0; i < v.size(); ++i) d[i] += self.grad[i] * k;
    }
    if (T* d = GradOf(self, 1)) {
      T acc = 0;
      for (size_t i = 0; i < v.size(); ++i) acc += self.grad[i] * v[i];
      d[0] += acc;
    }
  });
}

template <typename T>
Tensor<T> Pick(const Tensor<T>& x, int64_t i) {
  if (x.rank() != 1 || i < 0 || i >= x.dim(0)) {
    throw ShapeError("pick", {x.shape()}, "index " + std::to_string(i));
  }
  return MakeResult<T>({1}, {x.data()[i]}, {x}, [i](Node<T>& self) {
    if (T* d = GradOf(self, 0)) d[i] += self.grad[0];
  });
}

template <typename T>
Tensor<T> Concat(const std::vector<Tensor<T>>& xs, int64_t axis) {
  if (xs.empty()) throw ShapeError("concat", {}, "no inputs");
  const int64_t rank = xs[0].rank();
  if (axis < 0) axis += rank;
  std::vector<Shape> shapes;
  for (const auto& x : xs) shapes.push_back(x.shape());
  if (axis < 0 || axis >= rank) throw ShapeError("concat", shapes, "bad axis");
  Shape out_shape = xs[0].shape();
  out_shape[axis] = 0;
  for (const auto& x : xs) {
    if (x.rank() != rank) throw ShapeError("concat", shapes);
    for (int64_t a = 0; a < rank; ++a) {
      if (a != axis && x.shape()[a] != xs[0].shape()[a]) {
        throw ShapeError("concat", shapes);
      }
    }
    out_shape[axis] += x.shape()[axis];
  }
  int64_t outer = 1, inner = 1;
  for (int64_t a = 0; a < axis; ++a) outer *= out_shape[a];
  for (int64_t a = axis + 1; a < rank; ++a) inner *= out_shape[a];
  const int64_t out_row = out_shape[axis] * inner;

  std::vector<int64_t> chunk, offset;
  int64_t off = 0;
  for (const auto& x : xs) {
    chunk.push_back(x.shape()[axis] * inner);
    offset.push_back(off);
    off += chunk.back();
  }
  std::vector<T> out(outer * out_row);
  for (size_t k = 0; k < xs.size(); ++k) {
    const auto v = xs[k].data();
    for (int64_t o = 0; o < outer; ++o) {
      std::copy(v.begin() + o * chunk[k], v.begin() + (o + 1) * chunk[k],
                out.begin() + o * out_row + offset[k]);
    }
  }
  return MakeResult<T>(std::move(out_shape), std::move(out), xs,
                       [outer, out_row, chunk, offset](Node<T>& self) {
                         for (size_t k = 0; k < chunk.size(); ++k) {
                           T* d = GradOf(self, k);
                           if (!d) continue;
                           for (int64_t o = 0; o < outer; ++o) {
                             const T* src = self.grad.data() + o * out_row + offset[k];
                             T* dst = d + o * chunk[k];
                             for (int64_t i = 0; i < chunk[k]; ++i) dst[i] += src[i];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape) {
  if (NumElements(shape) != x.numel()) {
    throw ShapeError("reshape", {x.shape(), shape});
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  return MakeResult<T>(std::move(shape), std::move(out), {x}, [](Node<T>& self) {
    if (T* d = GradOf(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> Relu(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto v = x.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = v[i] > T(0) ? v[i] : T(0);
  return MakeResult<T>(x.shape(), std::move(out), {x}, [](Node<T>& self) {
    if (T* d = GradOf(self, 0)) {
      const auto& v = self.parents[0]->value;
      for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] > T(0)) d[i] += self.grad[i];
      }
    }
  });
}

template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto v = x.data();
  for (size_t i = 0; i < out.size(); ++i) {
    // Split by sign so exp never overflows.
    if (v[i] >= 0) {
      out[i] = T(1) / (T(1) + std::exp(-v[i]));
    } else {
      const T e = std::exp(v[i]);
      out[i] = e / (T(1) + e);
    }
  }
  return MakeResult<T>(x.shape(), std::move(out), {x}, [](Node<T>& self) {
    if (T* d = GradOf(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) {
        const T s = self.value[i];
        d[i] += self.grad[i] * s * (T(1) - s);
      }
    }
  });
}

template <typename T>
Tensor<T> Softmax(const Tensor<T>& x) {
  if (x.rank() < 1) throw ShapeError("softmax", {x.shape()});
  const int64_t n = x.dim(-1);
  const int64_t rows = x.numel() / n;
  std::vector<T> out(x.numel());
  const auto v = x.data();
  for (int64_t r = 0; r < rows; ++r) {
    const T* in = v.data() + r * n;
    T* o = out.data() + r * n;
    const T mx = *std::max_element(in, in + n);
    T z = 0;
    for (int64_t i = 0; i < n; ++i) {
      o[i] = std::exp(in[i] - mx);
      z += o[i];
    }
    for (int64_t i = 0; i < n; ++i) o[i] /= z;
  }
  return MakeResult<T>(x.shape(), std::move(out), {x}, [n, rows](Node<T>& self) {
    T* d = GradOf(self, 0);
    if (!d) return;
    for (int64_t r = 0; r < rows; ++r) {
      const T* s = self.value.data() + r * n;
      const T* g = self.grad.data() + r * n;
      T dot = 0;
      for (int64_t i = 0; i < n; ++i) dot += g[i] * s[i];
      for (int64_t i = 0; i < n; ++i) d[r * n + i] += s[i] * (g[i] - dot);
    }
  });
}

template <typename T>
Tensor<T> Conv1dSame(const Tensor<T>& x, const Tensor<T>& w,
                     const Tensor<T>& bias) {
  if (x.rank() != 3 || w.rank() != 3 || bias.rank() != 1 ||
      w.dim(1) != x.dim(1) || bias.dim(0) != w.dim(0)) {
    throw ShapeError("conv1d_same", {x.shape(), w.shape(), bias.shape()});
  }
  ConvGeometry g{};
  g.batch = x.dim(0);
  g.channels = x.dim(1);
  g.height = 1;
  g.width = x.dim(2);
  g.filters = w.dim(0);
  g.kh = 1;
  g.kw = w.dim(2);
  g.pad_top = 0;
  g.pad_left = SameLeftPad(g.kw);
  g.out_h = 1;
  g.out_w = g.width;
  return ConvCore<T>("conv1d_same", g, {g.batch, g.filters, g.width}, x, w, bias);
}

template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias,
                 Padding pad_h, Padding pad_w) {
  if (x.rank() != 4 || w.rank() != 4 || bias.rank() != 1 ||
      w.dim(1) != x.dim(1) || bias.dim(0) != w.dim(0)) {
    throw ShapeError("conv2d", {x.shape(), w.shape(), bias.shape()});
  }
  ConvGeometry g{};
  g.batch = x.dim(0);
  g.channels = x.dim(1);
  g.height = x.dim(2);
  g.width = x.dim(3);
  g.filters = w.dim(0);
  g.kh = w.dim(2);
  g.kw = w.dim(3);
  g.pad_top = pad_h == Padding::kSame ? SameLeftPad(g.kh) : 0;
  g.pad_left = pad_w == Padding::kSame ? SameLeftPad(g.kw) : 0;
  g.out_h = pad_h == Padding::kSame ? g.height : g.height - g.kh + 1;
  g.out_w = pad_w == Padding::kSame ? g.width : g.width - g.kw + 1;
  if (g.out_h < 1 || g.out_w < 1) {
    throw ShapeError("conv2d", {x.shape(), w.shape()},
                     "kernel larger than input under valid padding");
  }
  return ConvCore<T>("conv2d", g, {g.batch, g.filters, g.out_h, g.out_w}, x, w,
                     bias);
}

template <typename T>
Tensor<T> PNorm(const Tensor<T>& x, int p) {
  if (p != 1 && p != 2) throw Error("pnorm: p must be 1 or 2");
  if (x.rank() < 1) throw ShapeError("pnorm", {x.shape()});
  const int64_t n = x.dim(-1);
  const int64_t rows = x.numel() / n;
  Shape out_shape(x.shape().begin(), x.shape().end() - 1);
  if (out_shape.empty()) out_shape = {1};
  std::vector<T> out(rows);
  const auto v = x.data();
  for (int64_t r = 0; r < rows; ++r) {
    T acc = 0;
    for (int64_t i = 0; i < n; ++i) {
      const T e = v[r * n + i];
      acc += p == 1 ? std::abs(e) : e * e;
    }
    out[r] = p == 1 ? acc : std::sqrt(acc);
  }
  return MakeResult<T>(std::move(out_shape), std::move(out), {x},
                       [n, rows, p](Node<T>& self) {
                         T* d = GradOf(self, 0);
                         if (!d) return;
                         const auto& v = self.parents[0]->value;
                         for (int64_t r = 0; r < rows; ++r) {
                           const T g = self.grad[r];
                           const T norm = self.value[r];
                           for (int64_t i = 0; i < n; ++i) {
                             const T e = v[r * n + i];
                             if (p == 1) {
                               const T sign = e > 0 ? T(1) : (e < 0 ? T(-1) : T(0));
                               d[r * n + i] += g * sign;
                             } else if (norm > 0) {
                               d[r * n + i] += g * e / norm;
                             }
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Sum(const Tensor<T>& x) {
  T acc = 0;
  for (T v : x.data()) acc += v;
  return MakeResult<T>({1}, {acc}, {x}, [](Node<T>& self) {
    if (T* d = GradOf(self, 0)) {
      const size_t n = self.parents[0]->value.size();
      for (size_t i = 0; i < n; ++i) d[i] += self.grad[0];
    }
  });
}

template <typename T>
Tensor<T> Mean(const Tensor<T>& x) {
  T acc = 0;
  for (T v : x.data()) acc += v;
  const T n = static_cast<T>(x.numel());
  return MakeResult<T>({1}, {acc / n}, {x}, [n](Node<T>& self) {
    if (T* d = GradOf(self, 0)) {
      const size_t m = self.parents[0]->value.size();
      for (size_t i = 0; i < m; ++i) d[i] += self.grad[0] / n;
    }
  });
}

template <typename T>
Tensor<T> SumLastAxis(const Tensor<T>& x) {
  if (x.rank() < 1) throw ShapeError("sum_last", {x.shape()});
  const int64_t n = x.dim(-1);
  const int64_t rows = x.numel() / n;
  Shape out_shape(x.shape().begin(), x.shape().end() - 1);
  if (out_shape.empty()) out_shape = {1};
  std::vector<T> out(rows, T(0));
  const auto v = x.data();
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t i = 0; i < n; ++i) out[r] += v[r * n + i];
  }
  return MakeResult<T>(std::move(out_shape), std::move(out), {x},
                       [n, rows](Node<T>& self) {
                         if (T* d = GradOf(self, 0)) {
                           for (int64_t r = 0; r < rows; ++r) {
                             for (int64_t i = 0; i < n; ++i) d[r * n + i] += self.grad[r];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Gather(const Tensor<T>& table, const std::vector<int64_t>& rows) {
  if (table.rank() != 2 || rows.empty()) {
    throw ShapeError("gather", {table.shape()}, "expected (N, d) table and rows");
  }
  const int64_t n = table.dim(0), d = table.dim(1);
  const int64_t m = static_cast<int64_t>(rows.size());
  std::vector<T> out(m * d);
  const auto v = table.data();
  for (int64_t i = 0; i < m; ++i) {
    const int64_t r = rows[i];
    if (r < 0 || r >= n) {
      throw ShapeError("gather", {table.shape()},
                       "row " + std::to_string(r) + " out of range");
    }
    std::copy(v.begin() + r * d, v.begin() + (r + 1) * d, out.begin() + i * d);
  }
  return MakeResult<T>({m, d}, std::move(out), {table},
                       [rows, d](Node<T>& self) {
                         T* g = GradOf(self, 0);
                         if (!g) return;
                         for (size_t i = 0; i < rows.size(); ++i) {
                           const T* src = self.grad.data() + i * d;
                           T* dst = g + rows[i] * d;
                           for (int64_t k = 0; k < d; ++k) dst[k] += src[k];
                         }
                       });
}

template <typename T>
Tensor<T> BatchedMatVec(const Tensor<T>& mats, const Tensor<T>& vecs) {
  if (mats.rank() != 3 || vecs.rank() != 2 || mats.dim(0) != vecs.dim(0) ||
      mats.dim(1) != mats.dim(2) || mats.dim(2) != vecs.dim(1)) {
    throw ShapeError("bmv", {mats.shape(), vecs.shape()});
  }
  const int64_t b = vecs.dim(0), n = vecs.dim(1);
  std::vector<T> out(b * n, T(0));
  const auto m = mats.data(), v = vecs.data();
  for (int64_t k = 0; k < b; ++k) {
    for (int64_t i = 0; i < n; ++i) {
      T acc = 0;
      for (int64_t j = 0; j < n; ++j) acc += m[(k * n + i) * n + j] * v[k * n + j];
      out[k * n + i] = acc;
    }
  }
  return MakeResult<T>({b, n}, std::move(out), {mats, vecs}, [b, n](Node<T>& self) {
    const auto& m = self.parents[0]->value;
    const auto& v = self.parents[1]->value;
    T* dm = GradOf(self, 0);
    T* dv = GradOf(self, 1);
    for (int64_t k = 0; k < b; ++k) {
      for (int64_t i = 0; i < n; ++i) {
        const T g = self.grad[k * n + i];
        for (int64_t j = 0; j < n; ++j) {
          if (dm) dm[(k * n + i) * n + j] += g * v[k * n + j];
          if (dv) dv[k * n + j] += g * m[(k * n + i) * n + j];
        }
      }
    }
  });
}

template <typename T>
Tensor<T> BceWithLogits(const Tensor<T>& logits, const std::vector<T>& labels) {
  if (static_cast<int64_t>(labels.size()) != logits.numel()) {
    throw ShapeError("bce_logits", {logits.shape(),
                                    Shape{static_cast<int64_t>(labels.size())}});
  }
  const auto s = logits.data();
  const T n = static_cast<T>(labels.size());
  T acc = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const T z = s[i];
    acc += std::max(z, T(0)) - z * labels[i] + std::log1p(std::exp(-std::abs(z)));
  }
  return MakeResult<T>({1}, {acc / n}, {logits}, [labels, n](Node<T>& self) {
    T* d = GradOf(self, 0);
    if (!d) return;
    const auto& s = self.parents[0]->value;
    for (size_t i = 0; i < labels.size(); ++i) {
      const T z = s[i];
      const T sig = z >= 0 ? T(1) / (T(1) + std::exp(-z))
                           : std::exp(z) / (T(1) + std::exp(z));
      d[i] += self.grad[0] * (sig - labels[i]) / n;
    }
  });
}

std::vector<std::string> PrimitiveNames() {
  return {"matmul",    "add",         "sub",    "mul",       "affine",
          "add_bias",  "scale_rows",  "scale",  "pick",      "concat",
          "reshape",   "relu",        "sigmoid", "softmax",  "conv1d_same",
          "conv2d_same", "conv2d",    "pnorm",  "sum",       "mean",
          "sum_last",  "gather",      "bmv",    "bce_logits"};
}

template <typename T>
Tensor<T> ApplyPrimitive(const std::string& kind,
                         const std::vector<Tensor<T>>& in, const Attrs& attrs) {
  auto need = [&](size_t n) {
    if (in.size() != n) {
      std::vector<Shape> shapes;
      for (const auto& t : in) shapes.push_back(t.shape());
      throw ShapeError(kind, shapes,
                       "expected " + std::to_string(n) + " inputs");
    }
  };
  auto scalar = [&](const std::string& key, double fallback) {
    auto it = attrs.scalars.find(key);
    return it == attrs.scalars.end() ? fallback : it->second;
  };
  auto padding = [&](const std::string& key) {
    return scalar(key, 0) == 0 ? Padding::kSame : Padding::kValid;
  };
  if (kind == "matmul") { need(2); return MatMul(in[0], in[1]); }
  if (kind == "add") { need(2); return Add(in[0], in[1]); }
  if (kind == "sub") { need(2); return Sub(in[0], in[1]); }
  if (kind == "mul") { need(2); return Mul(in[0], in[1]); }
  if (kind == "affine") {
    need(1);
    return Affine(in[0], static_cast<T>(scalar("scale", 1)),
                  static_cast<T>(scalar("shift", 0)));
  }
  if (kind == "add_bias") { need(2); return AddBias(in[0], in[1]); }
  if (kind == "scale_rows") { need(2); return ScaleRows(in[0], in[1]); }
  if (kind == "scale") { need(2); return Scale(in[0], in[1]); }
  if (kind == "pick") {
    need(1);
    if (attrs.indices.size() != 1) throw Error("pick: needs exactly one index");
    return Pick(in[0], attrs.indices[0]);
  }
  if (kind == "concat") {
    return Concat(in, static_cast<int64_t>(scalar("axis", 0)));
  }
  if (kind == "reshape") {
    need(1);
    auto it = attrs.shapes.find("shape");
    if (it == attrs.shapes.end()) throw Error("reshape: missing 'shape' attribute");
    return Reshape(in[0], it->second);
  }
  if (kind == "relu") { need(1); return Relu(in[0]); }
  if (kind == "sigmoid") { need(1); return Sigmoid(in[0]); }
  if (kind == "softmax") { need(1); return Softmax(in[0]); }
  if (kind == "conv1d_same") { need(3); return Conv1dSame(in[0], in[1], in[2]); }
  if (kind == "conv2d_same") { need(3); return Conv2dSame(in[0], in[1], in[2]); }
  if (kind == "conv2d") {
    need(3);
    return Conv2d(in[0], in[1], in[2], padding("pad_h"), padding("pad_w"));
  }
  if (kind == "pnorm") {
    need(1);
    return PNorm(in[0], static_cast<int>(scalar("p", 2)));
  }
  if (kind == "sum") { need(1); return Sum(in[0]); }
  if (kind == "mean") { need(1); return Mean(in[0]); }
  if (kind == "sum_last") { need(1); return SumLastAxis(in[0]); }
  if (kind == "gather") { need(1); return Gather(in[0], attrs.indices); }
  if (kind == "bmv") { need(2); return BatchedMatVec(in[0], in[1]); }
  if (kind == "bce_logits") {
    need(1);
    std::vector<T> labels(attrs.labels.begin(), attrs.labels.end());
    return BceWithLogits(in[0], labels);
  }
  throw Error("unknown primitive id '" + kind + "'");
}

#define NASE_INSTANTIATE_OPS(T)                                                \
  template Tensor<T> MatMul(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> Add(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> Sub(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> Mul(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> Affine(const Tensor<T>&, T, T);                           \
  template Tensor<T> AddBias(const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> ScaleRows(const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> Scale(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> Pick(const Tensor<T>&, int64_t);                          \
  template Tensor<T> Concat(const std::vector<Tensor<T>>&, int64_t);           \
  template Tensor<T> Reshape(const Tensor<T>&, Shape);                         \
  template Tensor<T> Relu(const Tensor<T>&);                                   \
  template Tensor<T> Sigmoid(const Tensor<T>&);                                \
  template Tensor<T> Softmax(const Tensor<T>&);                                \
  template Tensor<T> Conv1dSame(const Tensor<T>&, const Tensor<T>&,            \
                                const Tensor<T>&);                             \
  template Tensor<T> Conv2d(const Tensor<T>&, const Tensor<T>&,                \
                            const Tensor<T>&, Padding, Padding);               \
  template Tensor<T> PNorm(const Tensor<T>&, int);                             \
  template Tensor<T> Sum(const Tensor<T>&);                                    \
  template Tensor<T> Mean(const Tensor<T>&);                                   \
  template Tensor<T> SumLastAxis(const Tensor<T>&);                            \
  template Tensor<T> Gather(const Tensor<T>&, const std::vector<int64_t>&);    \
  template Tensor<T> BatchedMatVec(const Tensor<T>&, const Tensor<T>&);        \
  template Tensor<T> BceWithLogits(const Tensor<T>&, const std::vector<T>&);   \
  template Tensor<T> ApplyPrimitive(const std::string&,                        \
                                    const std::vector<Tensor<T>>&, const Attrs&);

NASE_INSTANTIATE_OPS(float)
NASE_INSTANTIATE_OPS(double)

#undef NASE_INSTANTIATE_OPS

}  // namespace nase::ops
