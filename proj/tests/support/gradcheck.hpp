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


#ifndef GRIDCAST__TESTS__GRADCHECK_HPP_
#define GRIDCAST__TESTS__GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gridcast/autodiff/ops.hpp"
#include "gridcast/autodiff/tensor.hpp"

namespace gridcast::testing
{

using LossFn = std::function<ad::Var<double>(const std::vector<ad::Var<double>> &)>;

inline ad::Tensor<double> random_tensor(ad::Shape shape, std::mt19937_64 & rng, double lo = -1.0, double hi = 1.0)
{
  ad::Tensor<double> t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (double & v : t.values()) {
    v = u(rng);
  }
  return t;
}

/// Scalar probe sum(out * r) with a fixed random r, so every output element
/// contributes with a distinct weight.
inline ad::Var<double> probe(const ad::Var<double> & out, std::uint64_t seed = 99)
{
  std::mt19937_64 rng(seed);
  return ad::sum(ad::mul(out, ad::Var<double>(random_tensor(out.shape(), rng))));
}

/// Max over all input elements of |analytic - numeric| / max(|analytic|, |numeric|, floor),
/// numeric by central differences with step h.
inline double max_relative_error(const LossFn & f, const std::vector<ad::Tensor<double>> & inputs,
                                 double h = 1e-5, double floor = 1e-6)
{
  std::vector<ad::Var<double>> vars;
  for (const auto & t : inputs) {
    vars.emplace_back(t, true);
  }
  ad::backward(f(vars));
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].numel(); ++i) {
      auto eval = [&](double delta) {
        std::vector<ad::Var<double>> shifted;
        for (std::size_t j = 0; j < inputs.size(); ++j) {
          ad::Tensor<double> t = inputs[j];
          if (j == k) {
            t[i] += delta;
          }
          shifted.emplace_back(std::move(t), false);
        }
        return f(shifted).value()[0];
      };
      const double numeric = (eval(h) - eval(-h)) / (2.0 * h);
      const double analytic = vars[k].grad().empty() ? 0.0 : vars[k].grad()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace gridcast::testing

#endif  // GRIDCAST__TESTS__GRADCHECK_HPP_
