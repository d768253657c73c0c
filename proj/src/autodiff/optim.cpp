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


#include "gridcast/autodiff/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace gridcast::ad
{

template <typename T>
void adam_step(std::vector<Tensor<T> *> & params, const std::vector<Tensor<T>> & grads, AdamState<T> & state,
               const AdamConfig & config)
{
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: parameter and gradient counts differ");
  }
  if (state.m.empty()) {
    for (const Tensor<T> * p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state does not match the parameter list");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  const T b1 = static_cast<T>(config.beta1);
  const T b2 = static_cast<T>(config.beta2);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor<T> & p = *params[k];
    const Tensor<T> & g = grads[k];
    if (g.shape() != p.shape() || state.m[k].shape() != p.shape()) {
      throw std::invalid_argument("adam_step: shape mismatch " + shape_string(p.shape()) + " vs " +
                                  shape_string(g.shape()));
    }
    Tensor<T> & m = state.m[k];
    Tensor<T> & v = state.v[k];
    for (std::size_t i = 0; i < p.numel(); ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= static_cast<T>(config.lr * mhat / (std::sqrt(vhat) + config.eps));
    }
  }
}

template void adam_step<float>(std::vector<Tensor<float> *> &, const std::vector<Tensor<float>> &,
                               AdamState<float> &, const AdamConfig &);
template void adam_step<double>(std::vector<Tensor<double> *> &, const std::vector<Tensor<double>> &,
                                AdamState<double> &, const AdamConfig &);

}  // namespace gridcast::ad
