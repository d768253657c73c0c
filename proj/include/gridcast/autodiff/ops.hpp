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

#ifndef GRIDCAST__AUTODIFF__OPS_HPP_
#define GRIDCAST__AUTODIFF__OPS_HPP_

#include <utility>
#include <vector>

#include "gridcast/autodiff/tensor.hpp"

namespace gridcast::ad
{

// Image tensors are [N, C, H, W]; vectors are [N, D].

/// Cross-correlation. w: [O, C, k, k], b: [O] or undefined.
template <typename T>
Var<T> conv2d(const Var<T> & x, const Var<T> & w, const Var<T> & b, int stride, int padding);

/// Transpose of conv2d's linear map. w: [C, O, k, k], b: [O] or undefined.
/// Output side = (in - 1) * stride - 2 * padding + k.
template <typename T>
Var<T> deconv2d(const Var<T> & x, const Var<T> & w, const Var<T> & b, int stride, int padding);

template <typename T>
Var<T> add(const Var<T> & a, const Var<T> & b);
template <typename T>
Var<T> sub(const Var<T> & a, const Var<T> & b);
template <typename T>
Var<T> mul(const Var<T> & a, const Var<T> & b);
template <typename T>
Var<T> scale(const Var<T> & a, T s);

template <typename T>
Var<T> sigmoid(const Var<T> & x);
template <typename T>
Var<T> tanh(const Var<T> & x);
template <typename T>
Var<T> leaky_relu(const Var<T> & x, T slope);
template <typename T>
Var<T> exp(const Var<T> & x);

/// Concatenates along dim 1; all other dims must agree.
template <typename T>
Var<T> concat_channels(const std::vector<Var<T>> & xs);
template <typename T>
std::vector<Var<T>> split_channels(const Var<T> & x, const std::vector<int> & sizes);

/// [N, C] -> [N, C, H, W]
template <typename T>
Var<T> broadcast_spatial(const Var<T> & v, int height, int width);
/// [N, C, H, W] -> [N, C]
template <typename T>
Var<T> global_avg_pool(const Var<T> & x);
/// x: [N, I], w: [O, I], b: [O] -> [N, O]
template <typename T>
Var<T> linear(const Var<T> & x, const Var<T> & w, const Var<T> & b);

template <typename T>
Var<T> sum(const Var<T> & x);
template <typename T>
Var<T> mean(const Var<T> & x);

/// Mean over all elements of -[w y log s(l) + (1 - y) log(1 - s(l))], evaluated as
/// (1 - y) l + (1 + (w - 1) y) softplus(-l). Targets must be 0 or 1.
template <typename T>
Var<T> weighted_bce_with_logits(const Var<T> & logits, const Tensor<T> & targets, T pos_weight);

template <typename T>
struct DiagGaussian
{
  Var<T> mu;         // [N, D]
  Var<T> log_sigma;  // [N, D]
};

/// mu + exp(log_sigma) * noise
template <typename T>
Var<T> sample(const DiagGaussian<T> & dist, const Tensor<T> & noise);

/// KL(q || p) summed over latent dims, averaged over the batch.
template <typename T>
Var<T> kl_divergence(const DiagGaussian<T> & q, const DiagGaussian<T> & p);

/// Gate order i, f, o, g. w: [4 Hd, Cx + Hd, k, k], b: [4 Hd].
template <typename T>
struct ConvLstmWeights
{
  Var<T> w;
  Var<T> b;
};

template <typename T>
std::pair<Var<T>, Var<T>> convlstm_cell(const Var<T> & x, const Var<T> & h_prev, const Var<T> & c_prev,
                                        const ConvLstmWeights<T> & weights);

/// Gate order z, r. w_gates: [2 Hd, Cx + Hd, k, k], w_cand: [Hd, Cx + Hd, k, k].
template <typename T>
struct ConvGruWeights
{
  Var<T> w_gates;
  Var<T> b_gates;
  Var<T> w_cand;
  Var<T> b_cand;
};

/// h = (1 - z) h_prev + z tanh(cand), cand from (x, r h_prev).
template <typename T>
Var<T> convgru_cell(const Var<T> & x, const Var<T> & h_prev, const ConvGruWeights<T> & weights);

}  // namespace gridcast::ad

#endif  // GRIDCAST__AUTODIFF__OPS_HPP_
