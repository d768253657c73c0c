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


#ifndef GRIDCAST__AUTODIFF__OPTIM_HPP_
#define GRIDCAST__AUTODIFF__OPTIM_HPP_

#include <cstdint>
#include <vector>

#include "gridcast/autodiff/tensor.hpp"

namespace gridcast::ad
{

struct AdamConfig
{
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState
{
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update of every params[i] with grads[i]; the state
/// is sized on first use.
template <typename T>
void adam_step(std::vector<Tensor<T> *> & params, const std::vector<Tensor<T>> & grads, AdamState<T> & state,
               const AdamConfig & config);

}  // namespace gridcast::ad

#endif  // GRIDCAST__AUTODIFF__OPTIM_HPP_
