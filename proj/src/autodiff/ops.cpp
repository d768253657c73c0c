// Copyright 2026 The GridCast Authors
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

#include "gridcast/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gridcast::ad
{

namespace
{

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapR = Eigen::Map<MatR<T>>;
template <typename T>
using CMapR = Eigen::Map<const MatR<T>>;

// Products run on owned operands so results do not depend on buffer alignment.
template <typename T, typename L, typename R>
MatR<T> product(const L & l, const R & r)
{
  const MatR<T> a = l;
  const MatR<T> b = r;
  MatR<T> out(a.rows(), b.cols());
  out.noalias() = a * b;
  return out;
}

template <typename T>
void assign(T * dst, const MatR<T> & m)
{
  std::copy(m.data(), m.data() + m.size(), dst);
}

template <typename T>
void accumulate(T * dst, const MatR<T> & m)
{
  const T * src = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    dst[i] += src[i];
  }
}

// Wraps a forward value into a Var and, when any input needs a gradient,
// attaches `fn(grad_out, inputs)`; absent optional inputs are passed as null.
template <typename T, typename Fn>
Var<T> record(const char * op, Tensor<T> value, const std::vector<const Var<T> *> & inputs, Fn && fn)
{
  if (check_finite_enabled() && !value.all_finite()) {
    throw std::runtime_error(std::string("non-finite value produced by ") + op);
  }
  Var<T> out(std::move(value));
  bool any = false;
  for (const Var<T> * in : inputs) {
    any = any || (in->defined() && in->requires_grad());
  }
  if (!any) {
    return out;
  }
  Node<T> * self = out.node().get();
  self->requires_grad = true;
  std::vector<Node<T> *> slots;
  for (const Var<T> * in : inputs) {
    slots.push_back(in->defined() ? in->node().get() : nullptr);
    if (in->defined()) {
      self->parents.push_back(in->node());
    }
  }
  self->backward_fn = [self, slots = std::move(slots), fn = std::forward<Fn>(fn)]() { fn(self->grad, slots); };
  return out;
}

// Null when the input is absent or needs no gradient.
template <typename T>
T * grad_of(Node<T> * n)
{
  return (n && n->requires_grad) ? n->grad_buffer().data() : nullptr;
}

void require(bool ok, const std::string & msg)
{
  if (!ok) {
    throw std::invalid_argument(msg);
  }
}

template <typename T>
void require_same_shape(const char * op, const Var<T> & a, const Var<T> & b)
{
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                                    shape_string(b.shape()));
}

// cols[(c k + i) k + j][oh Wo + ow] = img[c][oh s - p + i][ow s - p + j]
template <typename T>
void im2col(const T * img, int C, int H, int W, int k, int s, int p, int Ho, int Wo, T * cols)
{
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        T * row = cols + (static_cast<std::size_t>(c * k + i) * k + j) * Ho * Wo;
        for (int oh = 0; oh < Ho; ++oh) {
          const int y = oh * s - p + i;
          T * dst = row + static_cast<std::size_t>(oh) * Wo;
          if (y < 0 || y >= H) {
            std::fill(dst, dst + Wo, T(0));
            continue;
          }
          const T * src = img + (static_cast<std::size_t>(c) * H + y) * W;
          for (int ow = 0; ow < Wo; ++ow) {
            const int x = ow * s - p + j;
            dst[ow] = (x >= 0 && x < W) ? src[x] : T(0);
          }
        }
      }
    }
  }
}

// adjoint of im2col, accumulating into img
template <typename T>
void col2im(const T * cols, int C, int H, int W, int k, int s, int p, int Ho, int Wo, T * img)
{
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const T * row = cols + (static_cast<std::size_t>(c * k + i) * k + j) * Ho * Wo;
        for (int oh = 0; oh < Ho; ++oh) {
          const int y = oh * s - p + i;
          if (y < 0 || y >= H) {
            continue;
          }
          const T * src = row + static_cast<std::size_t>(oh) * Wo;
          T * dst = img + (static_cast<std::size_t>(c) * H + y) * W;
          for (int ow = 0; ow < Wo; ++ow) {
            const int x = ow * s - p + j;
            if (x >= 0 && x < W) {
              dst[x] += src[ow];
            }
          }
        }
      }
    }
  }
}

template <typename T, typename F, typename DF>
Var<T> unary(const char * op, const Var<T> & x, F f, DF df)
{
  Tensor<T> y(x.shape());
  const T * xv = x.value().data();
  for (std::size_t i = 0; i < y.numel(); ++i) {
    y[i] = f(xv[i]);
  }
  return record<T>(op, std::move(y), {&x}, [df](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
    Node<T> * xn = in[0];
    const T * xv = xn->value.data();
    T * gx = grad_of(xn);
    const std::size_t n = g.numel();
    for (std::size_t i = 0; i < n; ++i) {
      gx[i] += g[i] * df(xv[i]);
    }
  });
}

template <typename T>
T sigmoid_scalar(T v)
{
  if (v >= T(0)) {
    return T(1) / (T(1) + std::exp(-v));
  }
  const T e = std::exp(v);
  return e / (T(1) + e);
}

template <typename T>
T softplus(T v)
{
  return std::max(v, T(0)) + std::log1p(std::exp(-std::abs(v)));
}

}  // namespace

// ---------------------------------------------------------------------------
// convolutions

template <typename T>
Var<T> conv2d(const Var<T> & x, const Var<T> & w, const Var<T> & b, int stride, int padding)
{
  require(x.value().rank() == 4 && w.value().rank() == 4,
          "conv2d: expected 4-D input and kernel, got " + shape_string(x.shape()) + " and " + shape_string(w.shape()));
  const int N = x.shape()[0], C = x.shape()[1], H = x.shape()[2], W = x.shape()[3];
  const int O = w.shape()[0], k = w.shape()[2];
  require(w.shape()[1] == C && w.shape()[3] == k,
          "conv2d: input " + shape_string(x.shape()) + " incompatible with kernel " + shape_string(w.shape()));
  require(stride >= 1 && padding >= 0, "conv2d: stride must be >= 1 and padding >= 0");
  require(!b.defined() || b.shape() == Shape{O},
          "conv2d: bias " + (b.defined() ? shape_string(b.shape()) : std::string("-")) + " does not match kernel " +
            shape_string(w.shape()));
  const int Ho = (H + 2 * padding - k) / stride + 1;
  const int Wo = (W + 2 * padding - k) / stride + 1;
  require(H + 2 * padding >= k && W + 2 * padding >= k,
          "conv2d: kernel " + shape_string(w.shape()) + " larger than padded input " + shape_string(x.shape()));
  const int K = C * k * k;
  const int P = Ho * Wo;
  const bool pointwise = k == 1 && stride == 1 && padding == 0;

  Tensor<T> y({N, O, Ho, Wo});
  std::vector<T> cols(pointwise ? 0 : static_cast<std::size_t>(N) * K * P);
  CMapR<T> Wm(w.value().data(), O, K);
  for (int n = 0; n < N; ++n) {
    const T * xn = x.value().data() + static_cast<std::size_t>(n) * C * H * W;
    const T * cn = xn;
    if (!pointwise) {
      T * buf = cols.data() + static_cast<std::size_t>(n) * K * P;
      im2col(xn, C, H, W, k, stride, padding, Ho, Wo, buf);
      cn = buf;
    }
    T * yn = y.data() + static_cast<std::size_t>(n) * O * P;
    assign(yn, product<T>(Wm, CMapR<T>(cn, K, P)));
    if (b.defined()) {
      for (int o = 0; o < O; ++o) {
        const T bias = b.value()[static_cast<std::size_t>(o)];
        for (int i = 0; i < P; ++i) {
          yn[static_cast<std::size_t>(o) * P + i] += bias;
        }
      }
    }
  }
  return record<T>(
    "conv2d", std::move(y), {&x, &w, &b},
    [=, cols = std::move(cols)](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
      T * gx = grad_of(in[0]);
      T * gw = grad_of(in[1]);
      T * gb = grad_of(in[2]);
      CMapR<T> Wm(in[1]->value.data(), O, K);
      std::vector<T> dcols(gx && !pointwise ? static_cast<std::size_t>(K) * P : 0);
      for (int n = 0; n < N; ++n) {
        CMapR<T> G(g.data() + static_cast<std::size_t>(n) * O * P, O, P);
        if (gw) {
          const T * cn = pointwise ? in[0]->value.data() + static_cast<std::size_t>(n) * C * H * W
                                   : cols.data() + static_cast<std::size_t>(n) * K * P;
          accumulate(gw, product<T>(G, CMapR<T>(cn, K, P).transpose()));
        }
        if (gb) {
          for (int o = 0; o < O; ++o) {
            T acc = 0;
            for (int i = 0; i < P; ++i) {
              acc += G(o, i);
            }
            gb[o] += acc;
          }
        }
        if (gx) {
          T * gxn = gx + static_cast<std::size_t>(n) * C * H * W;
          if (pointwise) {
            accumulate(gxn, product<T>(Wm.transpose(), G));
          } else {
            assign(dcols.data(), product<T>(Wm.transpose(), G));
            col2im(dcols.data(), C, H, W, k, stride, padding, Ho, Wo, gxn);
          }
        }
      }
    });
}

template <typename T>
Var<T> deconv2d(const Var<T> & x, const Var<T> & w, const Var<T> & b, int stride, int padding)
{
  require(x.value().rank() == 4 && w.value().rank() == 4,
          "deconv2d: expected 4-D input and kernel, got " + shape_string(x.shape()) + " and " +
            shape_string(w.shape()));
  const int N = x.shape()[0], C = x.shape()[1], H = x.shape()[2], W = x.shape()[3];
  const int O = w.shape()[1], k = w.shape()[2];
  require(w.shape()[0] == C && w.shape()[3] == k,
          "deconv2d: input " + shape_string(x.shape()) + " incompatible with kernel " + shape_string(w.shape()));
  require(stride >= 1 && padding >= 0, "deconv2d: stride must be >= 1 and padding >= 0");
  require(!b.defined() || b.shape() == Shape{O},
          "deconv2d: bias " + (b.defined() ? shape_string(b.shape()) : std::string("-")) +
            " does not match kernel " + shape_string(w.shape()));
  const int Ho = (H - 1) * stride - 2 * padding + k;
  const int Wo = (W - 1) * stride - 2 * padding + k;
  require(Ho >= 1 && Wo >= 1, "deconv2d: empty output for input " + shape_string(x.shape()));
  const int K = O * k * k;
  const int P = H * W;

  Tensor<T> y({N, O, Ho, Wo});
  std::vector<T> cols(static_cast<std::size_t>(K) * P);
  CMapR<T> Wm(w.value().data(), C, K);
  for (int n = 0; n < N; ++n) {
    assign(cols.data(),
           product<T>(Wm.transpose(), CMapR<T>(x.value().data() + static_cast<std::size_t>(n) * C * P, C, P)));
    T * yn = y.data() + static_cast<std::size_t>(n) * O * Ho * Wo;
    col2im(cols.data(), O, Ho, Wo, k, stride, padding, H, W, yn);
    if (b.defined()) {
      for (int o = 0; o < O; ++o) {
        T * plane = yn + static_cast<std::size_t>(o) * Ho * Wo;
        const T bias = b.value()[static_cast<std::size_t>(o)];
        for (int i = 0; i < Ho * Wo; ++i) {
          plane[i] += bias;
        }
      }
    }
  }
  return record<T>("deconv2d", std::move(y), {&x, &w, &b},
                   [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                     T * gx = grad_of(in[0]);
                     T * gw = grad_of(in[1]);
                     T * gb = grad_of(in[2]);
                     CMapR<T> Wm(in[1]->value.data(), C, K);
                     std::vector<T> dcols(static_cast<std::size_t>(K) * P);
                     for (int n = 0; n < N; ++n) {
                       const T * gn = g.data() + static_cast<std::size_t>(n) * O * Ho * Wo;
                       if (gb) {
                         for (int o = 0; o < O; ++o) {
                           const T * plane = gn + static_cast<std::size_t>(o) * Ho * Wo;
                           T acc = 0;
                           for (int i = 0; i < Ho * Wo; ++i) {
                             acc += plane[i];
                           }
                           gb[o] += acc;
                         }
                       }
                       if (!gx && !gw) {
                         continue;
                       }
                       im2col(gn, O, Ho, Wo, k, stride, padding, H, W, dcols.data());
                       CMapR<T> D(dcols.data(), K, P);
                       if (gx) {
                         accumulate(gx + static_cast<std::size_t>(n) * C * P, product<T>(Wm, D));
                       }
                       if (gw) {
                         CMapR<T> X(in[0]->value.data() + static_cast<std::size_t>(n) * C * P, C, P);
                         accumulate(gw, product<T>(X, D.transpose()));
                       }
                     }
                   });
}

// ---------------------------------------------------------------------------
// elementwise

template <typename T>
Var<T> add(const Var<T> & a, const Var<T> & b)
{
  require_same_shape("add", a, b);
  Tensor<T> y(a.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) {
    y[i] = a.value()[i] + b.value()[i];
  }
  return record<T>("add", std::move(y), {&a, &b}, [](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
    for (int k = 0; k < 2; ++k) {
      if (T * gi = grad_of(in[static_cast<std::size_t>(k)])) {
        for (std::size_t i = 0; i < g.numel(); ++i) {
          gi[i] += g[i];
        }
      }
    }
  });
}

template <typename T>
Var<T> sub(const Var<T> & a, const Var<T> & b)
{
  require_same_shape("sub", a, b);
  Tensor<T> y(a.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) {
    y[i] = a.value()[i] - b.value()[i];
  }
  return record<T>("sub", std::move(y), {&a, &b}, [](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
    if (T * ga = grad_of(in[0])) {
      for (std::size_t i = 0; i < g.numel(); ++i) {
        ga[i] += g[i];
      }
    }
    if (T * gb = grad_of(in[1])) {
      for (std::size_t i = 0; i < g.numel(); ++i) {
        gb[i] -= g[i];
      }
    }
  });
}

template <typename T>
Var<T> mul(const Var<T> & a, const Var<T> & b)
{
  require_same_shape("mul", a, b);
  Tensor<T> y(a.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) {
    y[i] = a.value()[i] * b.value()[i];
  }
  return record<T>("mul", std::move(y), {&a, &b}, [](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
    const T * av = in[0]->value.data();
    const T * bv = in[1]->value.data();
    if (T * ga = grad_of(in[0])) {
      for (std::size_t i = 0; i < g.numel(); ++i) {
        ga[i] += g[i] * bv[i];
      }
    }
    if (T * gb = grad_of(in[1])) {
      for (std::size_t i = 0; i < g.numel(); ++i) {
        gb[i] += g[i] * av[i];
      }
    }
  });
}

template <typename T>
Var<T> scale(const Var<T> & a, T s)
{
  return unary<T>("scale", a, [s](T v) { return s * v; }, [s](T) { return s; });
}

template <typename T>
Var<T> sigmoid(const Var<T> & x)
{
  return unary<T>("sigmoid", x, sigmoid_scalar<T>, [](T v) {
    const T s = sigmoid_scalar(v);
    return s * (T(1) - s);
  });
}

template <typename T>
Var<T> tanh(const Var<T> & x)
{
  return unary<T>("tanh", x, [](T v) { return std::tanh(v); }, [](T v) {
    const T t = std::tanh(v);
    return T(1) - t * t;
  });
}

template <typename T>
Var<T> leaky_relu(const Var<T> & x, T slope)
{
  return unary<T>("leaky_relu", x, [slope](T v) { return v > T(0) ? v : slope * v; },
                  [slope](T v) { return v > T(0) ? T(1) : slope; });
}

template <typename T>
Var<T> exp(const Var<T> & x)
{
  return unary<T>("exp", x, [](T v) { return std::exp(v); }, [](T v) { return std::exp(v); });
}

// ---------------------------------------------------------------------------
// shape ops

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>> & xs)
{
  require(!xs.empty(), "concat_channels: no inputs");
  Shape shape = xs[0].shape();
  require(shape.size() >= 2, "concat_channels: inputs need a channel dim, got " + shape_string(shape));
  int channels = 0;
  for (const auto & x : xs) {
    Shape a = x.shape();
    Shape b = shape;
    require(a.size() == b.size(), "concat_channels: rank mismatch " + shape_string(a) + " vs " + shape_string(b));
    channels += a[1];
    a[1] = b[1] = 0;
    require(a == b, "concat_channels: shape mismatch " + shape_string(x.shape()) + " vs " +
                      shape_string(xs[0].shape()));
  }
  const int N = shape[0];
  std::size_t inner = 1;
  for (std::size_t d = 2; d < shape.size(); ++d) {
    inner *= static_cast<std::size_t>(shape[d]);
  }
  shape[1] = channels;
  Tensor<T> y(shape);
  std::vector<int> sizes;
  std::size_t offset = 0;
  for (const auto & x : xs) {
    const std::size_t block = static_cast<std::size_t>(x.shape()[1]) * inner;
    for (int n = 0; n < N; ++n) {
      std::copy_n(x.value().data() + n * block, block,
                  y.data() + static_cast<std::size_t>(n) * channels * inner + offset);
    }
    offset += block;
    sizes.push_back(x.shape()[1]);
  }
  std::vector<const Var<T> *> ptrs;
  for (const auto & x : xs) {
    ptrs.push_back(&x);
  }
  return record<T>("concat_channels", std::move(y), ptrs,
                   [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                     std::size_t off = 0;
                     for (std::size_t k = 0; k < in.size(); ++k) {
                       const std::size_t block = static_cast<std::size_t>(sizes[k]) * inner;
                       if (T * gi = grad_of(in[k])) {
                         for (int n = 0; n < N; ++n) {
                           const T * src = g.data() + static_cast<std::size_t>(n) * channels * inner + off;
                           T * dst = gi + n * block;
                           for (std::size_t i = 0; i < block; ++i) {
                             dst[i] += src[i];
                           }
                         }
                       }
                       off += block;
                     }
                   });
}

template <typename T>
std::vector<Var<T>> split_channels(const Var<T> & x, const std::vector<int> & sizes)
{
  const Shape & shape = x.shape();
  require(shape.size() >= 2, "split_channels: input needs a channel dim, got " + shape_string(shape));
  require(std::accumulate(sizes.begin(), sizes.end(), 0) == shape[1],
          "split_channels: sizes do not add up to the channel count of " + shape_string(shape));
  const int N = shape[0];
  const int channels = shape[1];
  std::size_t inner = 1;
  for (std::size_t d = 2; d < shape.size(); ++d) {
    inner *= static_cast<std::size_t>(shape[d]);
  }
  std::vector<Var<T>> out;
  std::size_t offset = 0;
  for (int c : sizes) {
    Shape s = shape;
    s[1] = c;
    Tensor<T> y(s);
    const std::size_t block = static_cast<std::size_t>(c) * inner;
    for (int n = 0; n < N; ++n) {
      std::copy_n(x.value().data() + static_cast<std::size_t>(n) * channels * inner + offset, block,
                  y.data() + n * block);
    }
    out.push_back(record<T>("split_channels", std::move(y), {&x},
                            [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                              T * gx = grad_of(in[0]);
                              for (int n = 0; n < N; ++n) {
                                T * dst = gx + static_cast<std::size_t>(n) * channels * inner + offset;
                                const T * src = g.data() + n * block;
                                for (std::size_t i = 0; i < block; ++i) {
                                  dst[i] += src[i];
                                }
                              }
                            }));
    offset += block;
  }
  return out;
}

template <typename T>
Var<T> broadcast_spatial(const Var<T> & v, int height, int width)
{
  require(v.value().rank() == 2, "broadcast_spatial: expected [N, C], got " + shape_string(v.shape()));
  require(height >= 1 && width >= 1, "broadcast_spatial: empty target size");
  const int N = v.shape()[0], C = v.shape()[1];
  const std::size_t P = static_cast<std::size_t>(height) * width;
  Tensor<T> y({N, C, height, width});
  for (std::size_t nc = 0; nc < static_cast<std::size_t>(N) * C; ++nc) {
    std::fill_n(y.data() + nc * P, P, v.value()[nc]);
  }
  return record<T>("broadcast_spatial", std::move(y), {&v},
                   [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                     T * gv = grad_of(in[0]);
                     for (std::size_t nc = 0; nc < static_cast<std::size_t>(N) * C; ++nc) {
                       T acc = 0;
                       for (std::size_t i = 0; i < P; ++i) {
                         acc += g[nc * P + i];
                       }
                       gv[nc] += acc;
                     }
                   });
}

template <typename T>
Var<T> global_avg_pool(const Var<T> & x)
{
  require(x.value().rank() == 4, "global_avg_pool: expected [N, C, H, W], got " + shape_string(x.shape()));
  const int N = x.shape()[0], C = x.shape()[1];
  const std::size_t P = static_cast<std::size_t>(x.shape()[2]) * x.shape()[3];
  Tensor<T> y({N, C});
  for (std::size_t nc = 0; nc < static_cast<std::size_t>(N) * C; ++nc) {
    T acc = 0;
    for (std::size_t i = 0; i < P; ++i) {
      acc += x.value()[nc * P + i];
    }
    y[nc] = acc / static_cast<T>(P);
  }
  return record<T>("global_avg_pool", std::move(y), {&x},
                   [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                     T * gx = grad_of(in[0]);
                     for (std::size_t nc = 0; nc < static_cast<std::size_t>(N) * C; ++nc) {
                       const T v = g[nc] / static_cast<T>(P);
                       for (std::size_t i = 0; i < P; ++i) {
                         gx[nc * P + i] += v;
                       }
                     }
                   });
}

template <typename T>
Var<T> linear(const Var<T> & x, const Var<T> & w, const Var<T> & b)
{
  require(x.value().rank() == 2 && w.value().rank() == 2 && x.shape()[1] == w.shape()[1],
          "linear: input " + shape_string(x.shape()) + " incompatible with weight " + shape_string(w.shape()));
  const int N = x.shape()[0], I = x.shape()[1], O = w.shape()[0];
  require(!b.defined() || b.shape() == Shape{O}, "linear: bias does not match weight " + shape_string(w.shape()));
  Tensor<T> y({N, O});
  assign(y.data(), product<T>(CMapR<T>(x.value().data(), N, I), CMapR<T>(w.value().data(), O, I).transpose()));
  if (b.defined()) {
    for (int n = 0; n < N; ++n) {
      for (int o = 0; o < O; ++o) {
        y[static_cast<std::size_t>(n) * O + o] += b.value()[static_cast<std::size_t>(o)];
      }
    }
  }
  return record<T>("linear", std::move(y), {&x, &w, &b},
                   [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                     CMapR<T> G(g.data(), N, O);
                     if (T * gx = grad_of(in[0])) {
                       accumulate(gx, product<T>(G, CMapR<T>(in[1]->value.data(), O, I)));
                     }
                     if (T * gw = grad_of(in[1])) {
                       accumulate(gw, product<T>(G.transpose(), CMapR<T>(in[0]->value.data(), N, I)));
                     }
                     if (T * gb = grad_of(in[2])) {
                       for (int n = 0; n < N; ++n) {
                         for (int o = 0; o < O; ++o) {
                           gb[o] += G(n, o);
                         }
                       }
                     }
                   });
}

template <typename T>
Var<T> sum(const Var<T> & x)
{
  T acc = 0;
  for (T v : x.value().values()) {
    acc += v;
  }
  return record<T>("sum", Tensor<T>({1}, {acc}), {&x}, [](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
    T * gx = grad_of(in[0]);
    const std::size_t n = in[0]->value.numel();
    for (std::size_t i = 0; i < n; ++i) {
      gx[i] += g[0];
    }
  });
}

template <typename T>
Var<T> mean(const Var<T> & x)
{
  return scale(sum(x), T(1) / static_cast<T>(x.value().numel()));
}

// ---------------------------------------------------------------------------
// losses and distributions

template <typename T>
Var<T> weighted_bce_with_logits(const Var<T> & logits, const Tensor<T> & targets, T pos_weight)
{
  require(logits.shape() == targets.shape(), "weighted_bce_with_logits: logits " + shape_string(logits.shape()) +
                                               " vs targets " + shape_string(targets.shape()));
  require(pos_weight > T(0), "weighted_bce_with_logits: pos_weight must be positive");
  const std::size_t n = targets.numel();
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const T y = targets[i];
    require(y == T(0) || y == T(1), "weighted_bce_with_logits: targets must be 0 or 1");
    const T l = logits.value()[i];
    acc += (T(1) - y) * l + (T(1) + (pos_weight - T(1)) * y) * softplus(-l);
  }
  const T inv_n = T(1) / static_cast<T>(n);
  return record<T>("weighted_bce_with_logits", Tensor<T>({1}, {acc * inv_n}), {&logits},
                   [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                     T * gl = grad_of(in[0]);
                     const T * lv = in[0]->value.data();
                     for (std::size_t i = 0; i < n; ++i) {
                       const T y = targets[i];
                       const T d = (T(1) - y) - (T(1) + (pos_weight - T(1)) * y) * sigmoid_scalar(-lv[i]);
                       gl[i] += g[0] * d * inv_n;
                     }
                   });
}

template <typename T>
Var<T> sample(const DiagGaussian<T> & dist, const Tensor<T> & noise)
{
  require(dist.mu.shape() == noise.shape() && dist.log_sigma.shape() == noise.shape(),
          "sample: noise " + shape_string(noise.shape()) + " does not match distribution " +
            shape_string(dist.mu.shape()));
  return add(dist.mu, mul(exp(dist.log_sigma), Var<T>(noise)));
}

template <typename T>
Var<T> kl_divergence(const DiagGaussian<T> & q, const DiagGaussian<T> & p)
{
  require(q.mu.shape() == p.mu.shape() && q.log_sigma.shape() == p.log_sigma.shape() &&
            q.mu.shape() == q.log_sigma.shape() && q.mu.value().rank() == 2,
          "kl_divergence: shape mismatch " + shape_string(q.mu.shape()) + " vs " + shape_string(p.mu.shape()));
  const int N = q.mu.shape()[0];
  const std::size_t n = q.mu.value().numel();
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const T lq = q.log_sigma.value()[i], lp = p.log_sigma.value()[i];
    const T d = q.mu.value()[i] - p.mu.value()[i];
    const T s2q = std::exp(T(2) * lq), s2p = std::exp(T(2) * lp);
    acc += (lp - lq) + (s2q + d * d) / (T(2) * s2p) - T(0.5);
  }
  const T inv_n = T(1) / static_cast<T>(N);
  return record<T>("kl_divergence", Tensor<T>({1}, {acc * inv_n}), {&q.mu, &q.log_sigma, &p.mu, &p.log_sigma},
                   [=](const Tensor<T> & g, const std::vector<Node<T> *> & in) {
                     const T s = g[0] * inv_n;
                     T * gmq = grad_of(in[0]);
                     T * glq = grad_of(in[1]);
                     T * gmp = grad_of(in[2]);
                     T * glp = grad_of(in[3]);
                     for (std::size_t i = 0; i < n; ++i) {
                       const T lq = in[1]->value[i], lp = in[3]->value[i];
                       const T d = in[0]->value[i] - in[2]->value[i];
                       const T s2q = std::exp(T(2) * lq), s2p = std::exp(T(2) * lp);
                       if (gmq) {
                         gmq[i] += s * d / s2p;
                       }
                       if (gmp) {
                         gmp[i] -= s * d / s2p;
                       }
                       if (glq) {
                         glq[i] += s * (s2q / s2p - T(1));
                       }
                       if (glp) {
                         glp[i] += s * (T(1) - (s2q + d * d) / s2p);
                       }
                     }
                   });
}

// ---------------------------------------------------------------------------
// recurrent cells

template <typename T>
std::pair<Var<T>, Var<T>> convlstm_cell(const Var<T> & x, const Var<T> & h_prev, const Var<T> & c_prev,
                                        const ConvLstmWeights<T> & weights)
{
  require(h_prev.shape() == c_prev.shape(), "convlstm_cell: hidden " + shape_string(h_prev.shape()) +
                                              " vs cell " + shape_string(c_prev.shape()));
  const int hidden = h_prev.shape()[1];
  require(weights.w.shape()[0] == 4 * hidden, "convlstm_cell: kernel " + shape_string(weights.w.shape()) +
                                                 " does not produce 4 x " + std::to_string(hidden) + " gates");
  const int k = weights.w.shape()[2];
  const Var<T> gates = conv2d(concat_channels<T>({x, h_prev}), weights.w, weights.b, 1, k / 2);
  const auto g = split_channels(gates, {hidden, hidden, hidden, hidden});
  const Var<T> c = add(mul(sigmoid(g[1]), c_prev), mul(sigmoid(g[0]), tanh(g[3])));
  const Var<T> h = mul(sigmoid(g[2]), tanh(c));
  return {h, c};
}

template <typename T>
Var<T> convgru_cell(const Var<T> & x, const Var<T> & h_prev, const ConvGruWeights<T> & weights)
{
  const int hidden = h_prev.shape()[1];
  require(weights.w_gates.shape()[0] == 2 * hidden && weights.w_cand.shape()[0] == hidden,
          "convgru_cell: kernels " + shape_string(weights.w_gates.shape()) + ", " +
            shape_string(weights.w_cand.shape()) + " do not match hidden size " + std::to_string(hidden));
  const int k = weights.w_gates.shape()[2];
  const Var<T> zr = conv2d(concat_channels<T>({x, h_prev}), weights.w_gates, weights.b_gates, 1, k / 2);
  const auto gates = split_channels(zr, {hidden, hidden});
  const Var<T> z = sigmoid(gates[0]);
  const Var<T> r = sigmoid(gates[1]);
  const Var<T> cand =
    tanh(conv2d(concat_channels<T>({x, mul(r, h_prev)}), weights.w_cand, weights.b_cand, 1, k / 2));
  return add(h_prev, mul(z, sub(cand, h_prev)));
}

#define GRIDCAST_AD_INSTANTIATE(T)                                                                        \
  template Var<T> conv2d(const Var<T> &, const Var<T> &, const Var<T> &, int, int);                       \
  template Var<T> deconv2d(const Var<T> &, const Var<T> &, const Var<T> &, int, int);                     \
  template Var<T> add(const Var<T> &, const Var<T> &);                                                    \
  template Var<T> sub(const Var<T> &, const Var<T> &);                                                    \
  template Var<T> mul(const Var<T> &, const Var<T> &);                                                    \
  template Var<T> scale(const Var<T> &, T);                                                               \
  template Var<T> sigmoid(const Var<T> &);                                                                \
  template Var<T> tanh(const Var<T> &);                                                                   \
  template Var<T> leaky_relu(const Var<T> &, T);                                                          \
  template Var<T> exp(const Var<T> &);                                                                    \
  template Var<T> concat_channels(const std::vector<Var<T>> &);                                           \
  template std::vector<Var<T>> split_channels(const Var<T> &, const std::vector<int> &);                  \
  template Var<T> broadcast_spatial(const Var<T> &, int, int);                                            \
  template Var<T> global_avg_pool(const Var<T> &);                                                        \
  template Var<T> linear(const Var<T> &, const Var<T> &, const Var<T> &);                                 \
  template Var<T> sum(const Var<T> &);                                                                    \
  template Var<T> mean(const Var<T> &);                                                                   \
  template Var<T> weighted_bce_with_logits(const Var<T> &, const Tensor<T> &, T);                         \
  template Var<T> sample(const DiagGaussian<T> &, const Tensor<T> &);                                     \
  template Var<T> kl_divergence(const DiagGaussian<T> &, const DiagGaussian<T> &);                        \
  template std::pair<Var<T>, Var<T>> convlstm_cell(const Var<T> &, const Var<T> &, const Var<T> &,        \
                                                   const ConvLstmWeights<T> &);                           \
  template Var<T> convgru_cell(const Var<T> &, const Var<T> &, const ConvGruWeights<T> &);

GRIDCAST_AD_INSTANTIATE(float)
GRIDCAST_AD_INSTANTIATE(double)

}  // namespace gridcast::ad
