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

// Property checks shared by the unit tests and the acceptance runner.

#ifndef GRIDCAST__TESTS__CRITERIA_HPP_
#define GRIDCAST__TESTS__CRITERIA_HPP_

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "gridcast/dataset.hpp"
#include "gridcast/metrics.hpp"
#include "gridcast/occupancy_filter.hpp"
#include "gridcast/predictor.hpp"
#include "metric_oracles.hpp"
#include "samples.hpp"
#include "scenes.hpp"

namespace gridcast::testing
{

struct GradCase
{
  std::string name;
  double tolerance;
  std::function<double(std::mt19937_64 &)> error;
};

/// One finite-difference case per operator, drawing inputs from the caller's rng.
inline std::vector<GradCase> operator_gradient_cases()
{
  using namespace gridcast::ad;
  using Inputs = std::vector<Var<double>>;
  using R = std::mt19937_64;
  constexpr double kOp = 1e-3;
  constexpr double kPointwise = 1e-5;
  const Shape s{2, 3, 4};
  std::vector<GradCase> cases;
  auto add_case = [&](std::string name, double tol, std::function<double(R &)> f) {
    cases.push_back({std::move(name), tol, std::move(f)});
  };

  add_case("conv2d stride 2", kOp, [](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(conv2d(v[0], v[1], v[2], 2, 1)); },
                              {random_tensor({2, 3, 7, 6}, rng), random_tensor({4, 3, 3, 3}, rng),
                               random_tensor({4}, rng)});
  });
  add_case("conv2d 1x1", kOp, [](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(conv2d(v[0], v[1], v[2], 1, 0)); },
                              {random_tensor({1, 3, 4, 4}, rng), random_tensor({2, 3, 1, 1}, rng),
                               random_tensor({2}, rng)});
  });
  add_case("deconv2d", kOp, [](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(deconv2d(v[0], v[1], v[2], 2, 1)); },
                              {random_tensor({1, 3, 4, 5}, rng), random_tensor({3, 2, 4, 4}, rng),
                               random_tensor({2}, rng)});
  });
  add_case("linear", kOp, [](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(linear(v[0], v[1], v[2])); },
                              {random_tensor({3, 5}, rng), random_tensor({4, 5}, rng), random_tensor({4}, rng)});
  });
  add_case("global_avg_pool", kPointwise, [](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(global_avg_pool(v[0])); },
                              {random_tensor({2, 3, 4, 5}, rng)});
  });
  add_case("broadcast_spatial", kPointwise, [](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(broadcast_spatial(v[0], 3, 4)); },
                              {random_tensor({2, 3}, rng)});
  });
  add_case("concat/split channels", kPointwise, [](R & rng) {
    return max_relative_error(
        [](const Inputs & v) {
          const auto parts = split_channels(concat_channels<double>({v[0], v[1]}), {1, 4});
          return add(probe(parts[0], 1), probe(parts[1], 2));
        },
        {random_tensor({2, 2, 3, 3}, rng), random_tensor({2, 3, 3, 3}, rng)});
  });
  add_case("add", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(add(v[0], v[1])); },
                              {random_tensor(s, rng), random_tensor(s, rng)});
  });
  add_case("sub", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(sub(v[0], v[1])); },
                              {random_tensor(s, rng), random_tensor(s, rng)});
  });
  add_case("mul", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(mul(v[0], v[1])); },
                              {random_tensor(s, rng), random_tensor(s, rng)});
  });
  add_case("scale", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(scale(v[0], -1.7)); }, {random_tensor(s, rng)});
  });
  add_case("sigmoid", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(sigmoid(v[0])); }, {random_tensor(s, rng, -4, 4)});
  });
  add_case("tanh", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(ad::tanh(v[0])); }, {random_tensor(s, rng, -3, 3)});
  });
  add_case("leaky_relu", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(leaky_relu(v[0], 0.1)); }, {random_tensor(s, rng)});
  });
  add_case("exp", kPointwise, [s](R & rng) {
    return max_relative_error([](const Inputs & v) { return probe(ad::exp(v[0])); }, {random_tensor(s, rng)});
  });
  add_case("weighted bce", kPointwise, [](R & rng) {
    Tensor<double> targets({2, 1, 3, 3});
    std::bernoulli_distribution coin(0.3);
    for (double & t : targets.values()) {
      t = coin(rng) ? 1.0 : 0.0;
    }
    return max_relative_error([&](const Inputs & v) { return weighted_bce_with_logits(v[0], targets, 5.0); },
                              {random_tensor({2, 1, 3, 3}, rng, -5, 5)});
  });
  add_case("kl divergence", kPointwise, [](R & rng) {
    return max_relative_error([](const Inputs & v) { return kl_divergence<double>({v[0], v[1]}, {v[2], v[3]}); },
                              {random_tensor({2, 6}, rng), random_tensor({2, 6}, rng), random_tensor({2, 6}, rng),
                               random_tensor({2, 6}, rng)});
  });
  add_case("reparameterized sample", kOp, [](R & rng) {
    const auto noise = random_tensor({2, 6}, rng);
    return max_relative_error(
        [&](const Inputs & v) {
          const Var<double> z = sample<double>({v[0], v[1]}, noise);
          return sum(mul(z, z));
        },
        {random_tensor({2, 6}, rng), random_tensor({2, 6}, rng)});
  });
  add_case("convlstm cell", kOp, [](R & rng) {
    return max_relative_error(
        [](const Inputs & v) {
          const auto [h, c] = convlstm_cell<double>(v[0], v[1], v[2], {v[3], v[4]});
          return add(probe(h, 3), probe(c, 4));
        },
        {random_tensor({1, 2, 4, 4}, rng), random_tensor({1, 3, 4, 4}, rng), random_tensor({1, 3, 4, 4}, rng),
         random_tensor({12, 5, 3, 3}, rng, -0.5, 0.5), random_tensor({12}, rng)});
  });
  add_case("convgru cell", kOp, [](R & rng) {
    return max_relative_error(
        [](const Inputs & v) { return probe(convgru_cell<double>(v[0], v[1], {v[2], v[3], v[4], v[5]})); },
        {random_tensor({1, 2, 4, 4}, rng), random_tensor({1, 3, 4, 4}, rng),
         random_tensor({6, 5, 3, 3}, rng, -0.5, 0.5), random_tensor({6}, rng),
         random_tensor({3, 5, 3, 3}, rng, -0.5, 0.5), random_tensor({3}, rng)});
  });
  return cases;
}

/// Finite-difference error of the full training loss of the tiny model.
inline double end_to_end_gradient_error()
{
  const ModelConfig c = tiny_config();
  const Predictor<double> m(c, 11);
  const auto s = moving_blob_sample(c, 4);
  std::vector<std::string> names;
  std::vector<ad::Tensor<double>> values;
  std::mt19937_64 rng(17);
  for (const auto & [name, t] : m.parameters()) {
    names.push_back(name);
    // nonzero biases keep leaky-ReLU inputs off the kink on all-zero input patches
    values.push_back(name.ends_with(".b") ? random_tensor(t.shape(), rng, -0.3, 0.3) : t);
  }
  const auto noise = random_tensor({1, c.latent_dim}, rng);
  const auto f = [&](const std::vector<ad::Var<double>> & vars) {
    Predictor<double>::Bound p;
    for (std::size_t i = 0; i < names.size(); ++i) {
      p.emplace(names[i], vars[i]);
    }
    return compute_loss(m.forward(p, s, &noise), s.targets, c).total;
  };
  return max_relative_error(f, values);
}

struct OracleComparison
{
  double soft_iou = 0.0;  // max abs difference
  double iou = 0.0;
  double auc = 0.0;
  int auc_defined = 0;
  int definedness_mismatches = 0;
  bool in_range = true;
};

/// Library metrics against brute-force references on random 16x16 instances.
inline OracleComparison compare_metric_oracles(int instances, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OracleComparison out;
  for (int trial = 0; trial < instances; ++trial) {
    const double density = u(rng);
    std::vector<float> pred(256);
    std::vector<float> gt(256);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      gt[i] = u(rng) < density ? 1.0F : 0.0F;
      // mix of smooth and exactly-on-threshold values
      pred[i] = trial % 3 == 0 ? static_cast<float>(std::floor(u(rng) * 100.0) / 100.0) : static_cast<float>(u(rng));
    }
    const double s = soft_iou(pred, gt);
    const double b = iou_binary(pred, gt);
    out.soft_iou = std::max(out.soft_iou, std::abs(s - oracle::soft_iou(pred, gt)));
    out.iou = std::max(out.iou, std::abs(b - oracle::iou_binary(pred, gt)));
    out.in_range = out.in_range && s >= 0.0 && s <= 1.0 && b >= 0.0 && b <= 1.0;
    const auto a = auc_pr(pred, gt);
    const auto ref = oracle::auc_pr(pred, gt);
    if (a.has_value() != ref.has_value()) {
      ++out.definedness_mismatches;
    } else if (a) {
      ++out.auc_defined;
      out.auc = std::max(out.auc, std::abs(*a - *ref));
      out.in_range = out.in_range && *a >= 0.0 && *a <= 1.0;
    }
  }
  return out;
}

struct NormalizationSweep
{
  int scenarios = 0;
  int frames = 0;
  double max_error = 0.0;
};

/// Runs the filter over every frame of random scenarios, at the fine filter
/// resolution and after downsampling to the model grid.
inline NormalizationSweep filter_normalization_sweep(int scenarios, std::uint64_t first_seed,
                                                     const DatasetConfig & config = {})
{
  NormalizationSweep out;
  for (int k = 0; k < scenarios; ++k) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(k);
    const Scenario sc = generate_scenario(seed, config.scenario);
    const Pose2D ego = sc.ego.poses.front();
    const GridSpec coarse = anchor_from_ego(ego, config.extent, config.resolution());
    const GridSpec fine = coarse.with_resolution(config.resolution() / config.filter_upsample);
    SequenceOptions opts;
    opts.lidar = config.lidar;
    opts.lidar.noise_seed = seed;
    for (const DogmFrame & f : run_sequence(sc, fine, config.filter, 0, config.scenario.duration_frames, opts)) {
      out.max_error = std::max(out.max_error, f.max_normalization_error());
      ++out.frames;
    }
    for (const DogmFrame & f : generate_sequence(seed, config).dogm) {
      out.max_error = std::max(out.max_error, f.max_normalization_error());
      ++out.frames;
    }
    ++out.scenarios;
  }
  return out;
}

struct StaticObservation
{
  int hit_cells = 0;
  double min_p_static = 1.0;
};

/// A parked vehicle observed for ten frames; p_static at the cells its
/// outline returns hit in the last scan.
inline StaticObservation parked_vehicle_observation()
{
  Scenario s = empty_scenario(10);
  s.vehicles.push_back(constant_track(1, {4.0, 12.0, 0.3}, 0.0, 10));
  const GridSpec spec = anchor_from_ego(s.ego.poses[0], 40.0, 0.25);
  const auto frames = run_sequence(s, spec, {}, 0, 10);
  const auto obs = rasterize_scan(raycast(s, 9), spec);
  StaticObservation out;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i] == CellObservation::kHit) {
      ++out.hit_cells;
      out.min_p_static = std::min(out.min_p_static, static_cast<double>(frames.back().planes[kStatic][i]));
    }
  }
  return out;
}

inline bool bit_equal(const ad::Tensor<float> & a, const ad::Tensor<float> & b)
{
  return a.shape() == b.shape() && std::memcmp(a.data(), b.data(), a.numel() * sizeof(float)) == 0;
}

inline ad::Tensor<float> infer_logits(const Predictor<float> & m, const SequenceSample & s)
{
  const auto p = m.bind(false);
  return m.forward(p, s, nullptr).logits.value();
}

/// Logits of a model with `channel` ("semantics" or "map") disabled are
/// compared under `trials` random rewrites of that input.
inline bool ablated_input_is_ignored(const std::string & channel, int trials, std::uint64_t seed)
{
  const ModelConfig base_config = tiny_config();
  const ModelConfig c = apply_ablation(base_config, channel == "semantics" ? "dogm+map" : "dogm+sem");
  const Predictor<float> m(c, 2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-3.0F, 3.0F);
  const int S = c.grid_side;
  const std::size_t plane = static_cast<std::size_t>(S) * static_cast<std::size_t>(S);
  bool same = true;
  for (int t = 0; t < trials; ++t) {
    const auto base = moving_blob_sample(base_config, seed + static_cast<std::uint64_t>(t));
    const auto reference = infer_logits(m, base);
    SequenceSample other = base;
    if (channel == "semantics") {
      for (int n = 0; n < c.input_frames; ++n) {
        for (std::size_t i = 0; i < plane; ++i) {
          other.inputs[(static_cast<std::size_t>(n) * 4 + 3) * plane + i] = u(rng);
        }
      }
    } else {
      for (float & v : other.map.values()) {
        v = u(rng);
      }
    }
    same = same && bit_equal(reference, infer_logits(m, other));
    if (channel == "map") {
      other.map = ad::Tensor<float>();
      same = same && bit_equal(reference, infer_logits(m, other));
    }
  }
  return same;
}

}  // namespace gridcast::testing

#endif  // GRIDCAST__TESTS__CRITERIA_HPP_
