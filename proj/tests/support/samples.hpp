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

#ifndef GRIDCAST__TESTS__SAMPLES_HPP_
#define GRIDCAST__TESTS__SAMPLES_HPP_

#include <algorithm>
#include <random>

#include "gridcast/predictor.hpp"

namespace gridcast::testing
{

inline ModelConfig tiny_config()
{
  ModelConfig c;
  c.input_frames = 2;
  c.future_steps = 2;
  c.grid_side = 16;
  c.latent_dim = 3;
  c.base_channels = 2;
  c.lstm_layers = 2;
  c.gru_layers = 2;
  return c;
}

/// A square blob moving one cell per frame to the right, on a random background.
inline SequenceSample moving_blob_sample(const ModelConfig & c, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  const int S = c.grid_side;
  std::uniform_int_distribution<int> pos(2, S / 2);
  const int r0 = pos(rng);
  const int c0 = pos(rng);
  SequenceSample s;
  s.inputs = ad::Tensor<float>({c.input_frames, 4, S, S});
  s.map = ad::Tensor<float>({1, 3, S, S});
  s.targets = ad::Tensor<float>({1, c.output_frames(), S, S});
  std::uniform_real_distribution<float> u(0.0F, 1.0F);
  auto at = [S](ad::Tensor<float> & t, int n, int ch, int chans, int r, int col) -> float & {
    return t[((static_cast<std::size_t>(n) * chans + ch) * S + r) * S + col];
  };
  auto inside = [&](int frame, int r, int col) {
    const int shift = frame;
    return r >= r0 && r < r0 + 3 && col >= c0 + shift && col < c0 + shift + 3;
  };
  for (int n = 0; n < c.input_frames; ++n) {
    for (int r = 0; r < S; ++r) {
      for (int col = 0; col < S; ++col) {
        const bool occ = inside(n, r, col);
        at(s.inputs, n, 0, 4, r, col) = occ ? 0.0F : 0.3F * u(rng);
        at(s.inputs, n, 1, 4, r, col) = occ ? 0.8F : 0.0F;
        at(s.inputs, n, 2, 4, r, col) = occ ? 0.1F : 0.05F * u(rng);
        at(s.inputs, n, 3, 4, r, col) = occ ? 1.0F : 0.0F;
      }
    }
  }
  for (int r = 0; r < S; ++r) {
    for (int col = 0; col < S; ++col) {
      at(s.map, 0, 0, 3, r, col) = (r >= r0 - 1 && r < r0 + 4) ? 1.0F : 0.0F;
      at(s.map, 0, 2, 3, r, col) = 0.75F;
    }
  }
  for (int k = 0; k < c.output_frames(); ++k) {
    for (int r = 0; r < S; ++r) {
      for (int col = 0; col < S; ++col) {
        at(s.targets, 0, k, c.output_frames(), r, col) = inside(c.input_frames - 1 + k, r, col) ? 1.0F : 0.0F;
      }
    }
  }
  return s;
}

}  // namespace gridcast::testing

#endif  // GRIDCAST__TESTS__SAMPLES_HPP_
