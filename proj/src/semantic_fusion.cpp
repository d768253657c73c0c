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

#include "gridcast/semantic_fusion.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gridcast/geometry.hpp"

namespace gridcast
{

SemanticGrid associate_labels(const DogmFrame & frame, const VehicleGrid & semantics, double threshold)
{
  if (!(frame.spec == semantics.spec)) {
    throw std::invalid_argument("associate_labels: DOGM and semantic grids use different geometry");
  }
  SemanticGrid out(frame.spec);
  const std::size_t n = frame.spec.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    const bool occupied = frame.planes[kStatic][i] > threshold || frame.planes[kDynamic][i] > threshold;
    out.labels[i] = (occupied && semantics.occupancy[i] >= 0.5F) ? 1 : 0;
  }
  return out;
}

double footprint_margin(const GridSpec & spec)
{
  return spec.resolution() / std::numbers::sqrt2;
}

std::set<int> perceived_vehicles(std::span<const DogmFrame> frames, const Scenario & scenario,
                                 const GridSpec & spec, int first_frame, double threshold)
{
  if (frames.empty()) {
    throw std::invalid_argument("perceived_vehicles: empty frame sequence");
  }
  const double margin = footprint_margin(spec);
  std::set<int> ids;
  for (const VehicleTrack & v : scenario.vehicles) {
    bool seen = false;
    for (std::size_t k = 0; k < frames.size() && !seen; ++k) {
      const DogmFrame & f = frames[k];
      for_each_cell_in_box(spec, v.box_at(first_frame + static_cast<int>(k)), margin,
                           [&](CellIndex, std::size_t i) {
                             if (f.occupied(i) > threshold) {
                               seen = true;
                             }
                           });
    }
    if (seen) {
      ids.insert(v.id);
    }
  }
  return ids;
}

std::vector<VehicleGrid> build_targets(const Scenario & scenario, const GridSpec & spec,
                                       const std::set<int> & perceived, std::span<const int> frames,
                                       const TargetOptions & options)
{
  std::vector<VehicleGrid> out;
  out.reserve(frames.size());
  for (int f : frames) {
    VehicleGrid g(spec);
    auto stamp = [&](const VehicleTrack & v) {
      for_each_cell_in_box(spec, v.box_at(f), 0.0, [&](CellIndex, std::size_t i) { g.occupancy[i] = 1.0F; });
    };
    for (const VehicleTrack & v : scenario.vehicles) {
      if (options.comparison_mode || perceived.contains(v.id)) {
        stamp(v);
      }
    }
    if (options.include_ego) {
      stamp(scenario.ego);
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// label noise

NoiseParams NoiseParams::calibrated()
{
  // fitted with `gridcast calibrate-noise --seed 1000 --scenarios 200`
  NoiseParams p;
  p.dropout_prob = 0.40;
  p.erode_prob = 0.0;
  p.jitter_cells = 0;
  p.fp_per_vehicle = 0.2;
  return p;
}

nlohmann::json noise_params_to_json(const NoiseParams & p)
{
  return {{"dropout_prob", p.dropout_prob}, {"erode_prob", p.erode_prob},
          {"jitter_cells", p.jitter_cells}, {"fp_per_vehicle", p.fp_per_vehicle},
          {"fp_length", p.fp_length},       {"fp_width", p.fp_width},
          {"fp_offset_min", p.fp_offset_min}, {"fp_offset_max", p.fp_offset_max}};
}

NoiseParams noise_params_from_json(const nlohmann::json & j)
{
  NoiseParams p;
  p.dropout_prob = j.value("dropout_prob", p.dropout_prob);
  p.erode_prob = j.value("erode_prob", p.erode_prob);
  p.jitter_cells = j.value("jitter_cells", p.jitter_cells);
  p.fp_per_vehicle = j.value("fp_per_vehicle", p.fp_per_vehicle);
  p.fp_length = j.value("fp_length", p.fp_length);
  p.fp_width = j.value("fp_width", p.fp_width);
  p.fp_offset_min = j.value("fp_offset_min", p.fp_offset_min);
  p.fp_offset_max = j.value("fp_offset_max", p.fp_offset_max);
  return p;
}

namespace
{

// 4-connected components of the nonzero cells; returns per-cell labels (0 = background).
int label_components(const VehicleGrid & g, std::vector<int> & labels)
{
  const int n = g.spec.cells_per_side();
  labels.assign(g.occupancy.size(), 0);
  int next = 0;
  std::vector<int> stack;
  for (int start = 0; start < n * n; ++start) {
    if (g.occupancy[static_cast<std::size_t>(start)] == 0.0F || labels[static_cast<std::size_t>(start)] != 0) {
      continue;
    }
    ++next;
    stack.push_back(start);
    labels[static_cast<std::size_t>(start)] = next;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const int r = i / n;
      const int c = i % n;
      const int nbrs[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto & nb : nbrs) {
        if (nb[0] < 0 || nb[1] < 0 || nb[0] >= n || nb[1] >= n) {
          continue;
        }
        const int j = nb[0] * n + nb[1];
        if (g.occupancy[static_cast<std::size_t>(j)] != 0.0F && labels[static_cast<std::size_t>(j)] == 0) {
          labels[static_cast<std::size_t>(j)] = next;
          stack.push_back(j);
        }
      }
    }
  }
  return next;
}

std::vector<std::uint8_t> morph_step(const std::vector<std::uint8_t> & mask, int n, bool dilate)
{
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * n + c;
      bool any = mask[i] != 0;
      bool all = mask[i] != 0;
      const int nbrs[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto & nb : nbrs) {
        const bool v = nb[0] >= 0 && nb[1] >= 0 && nb[0] < n && nb[1] < n &&
                       mask[static_cast<std::size_t>(nb[0]) * n + nb[1]] != 0;
        any = any || v;
        all = all && v;
      }
      out[i] = dilate ? any : all;
    }
  }
  return out;
}

}  // namespace

VehicleGrid corrupt_semantics(const VehicleGrid & gt, std::uint64_t seed, const NoiseParams & noise)
{
  if (noise.is_zero()) {
    return gt;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = gt.spec.cells_per_side();
  std::vector<int> labels;
  const int count = label_components(gt, labels);

  VehicleGrid out(gt.spec);
  std::vector<std::uint8_t> mask(gt.occupancy.size());
  std::vector<Vec2> centroids;
  for (int comp = 1; comp <= count; ++comp) {
    double sr = 0.0, sc = 0.0, cells = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      mask[i] = labels[i] == comp ? 1 : 0;
      if (mask[i]) {
        sr += static_cast<double>(i / static_cast<std::size_t>(n));
        sc += static_cast<double>(i % static_cast<std::size_t>(n));
        cells += 1.0;
      }
    }
    const double res = gt.spec.resolution();
    centroids.push_back(gt.spec.to_world({(sc / cells + 0.5) * res, (sr / cells + 0.5) * res}));

    const bool dropped = u01(rng) < noise.dropout_prob;
    const bool erode = u01(rng) < noise.erode_prob;
    if (dropped) {
      continue;
    }
    for (int k = 0; k < noise.jitter_cells; ++k) {
      mask = morph_step(mask, n, !erode);
    }
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) {
        out.occupancy[i] = 1.0F;
      }
    }
  }

  // false positives cluster around true vehicles
  std::poisson_distribution<int> blobs(std::max(noise.fp_per_vehicle, 1e-12));
  for (const Vec2 & centre : centroids) {
    const int k = noise.fp_per_vehicle > 0.0 ? blobs(rng) : 0;
    for (int b = 0; b < k; ++b) {
      const double ang = 2.0 * std::numbers::pi * u01(rng);
      const double dist = noise.fp_offset_min + (noise.fp_offset_max - noise.fp_offset_min) * u01(rng);
      const double heading = 2.0 * std::numbers::pi * u01(rng);
      const OrientedBox box{{centre.x + dist * std::cos(ang), centre.y + dist * std::sin(ang), heading},
                            noise.fp_length, noise.fp_width};
      for_each_cell_in_box(gt.spec, box, 0.0, [&](CellIndex, std::size_t i) { out.occupancy[i] = 1.0F; });
    }
  }
  return out;
}

namespace
{

std::vector<VehicleGrid> corrupt_all(std::span<const VehicleGrid> clean, std::uint64_t seed, const NoiseParams & p)
{
  std::vector<VehicleGrid> out;
  out.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    out.push_back(corrupt_semantics(clean[i], rng(), p));
  }
  return out;
}

}  // namespace

NoiseFit fit_noise(std::span<const VehicleGrid> clean, std::uint64_t seed, double target_iou,
                   double target_precision)
{
  if (clean.empty()) {
    throw std::invalid_argument("fit_noise: no clean grids");
  }
  NoiseFit best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int jitter = 0; jitter <= 1; ++jitter) {
    for (int e = 0; e <= (jitter ? 4 : 0); ++e) {
      for (int d = 0; d <= 12; ++d) {
        for (int f = 0; f <= 10; ++f) {
          NoiseParams p;
          p.jitter_cells = jitter;
          p.erode_prob = 0.25 * e;
          p.dropout_prob = 0.05 * d;
          p.fp_per_vehicle = 0.1 * f;
          const auto noisy = corrupt_all(clean, seed, p);
          const NoiseQuality q = measure_noise(clean, noisy);
          const double err = std::hypot(q.iou - target_iou, q.precision - target_precision);
          if (err < best_err) {
            best_err = err;
            best = {p, q};
          }
        }
      }
    }
  }
  return best;
}

NoiseQuality measure_noise(std::span<const VehicleGrid> clean, std::span<const VehicleGrid> noisy)
{
  if (clean.size() != noisy.size()) {
    throw std::invalid_argument("measure_noise: grid counts differ");
  }
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t g = 0; g < clean.size(); ++g) {
    const auto & a = clean[g].occupancy;
    const auto & b = noisy[g].occupancy;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool t = a[i] != 0.0F;
      const bool p = b[i] != 0.0F;
      tp += (t && p) ? 1.0 : 0.0;
      fp += (!t && p) ? 1.0 : 0.0;
      fn += (t && !p) ? 1.0 : 0.0;
    }
  }
  NoiseQuality q;
  q.iou = tp + fp + fn > 0.0 ? tp / (tp + fp + fn) : 1.0;
  q.precision = tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
  q.recall = tp + fn > 0.0 ? tp / (tp + fn) : 1.0;
  return q;
}

// ---------------------------------------------------------------------------

RasterMap rasterize_map(const WorldMap & world_map, const GridSpec & spec)
{
  RasterMap map(spec);
  std::vector<Polyline> lanes;
  lanes.reserve(world_map.lanes.size());
  for (const Lane & l : world_map.lanes) {
    lanes.emplace_back(l.centerline);
  }
  const int n = spec.cells_per_side();
  const double res = spec.resolution();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t i = spec.flat({r, c});
      const Vec2 p = spec.to_world({(c + 0.5) * res, (r + 0.5) * res});
      int best_lane = -1;
      double best_dist = 0.0;
      double best_heading = 0.0;
      for (std::size_t k = 0; k < lanes.size(); ++k) {
        const auto [d, heading] = lanes[k].nearest(p);
        if (d <= 0.5 * world_map.lanes[k].width && (best_lane < 0 || d < best_dist)) {
          best_lane = static_cast<int>(k);
          best_dist = d;
          best_heading = heading;
        }
      }
      if (best_lane >= 0) {
        map.channels[0][i] = 1.0F;
        const double half = 0.5 * world_map.lanes[static_cast<std::size_t>(best_lane)].width;
        map.channels[1][i] = best_dist > half - res ? 1.0F : 0.0F;
        double h = std::fmod(best_heading, two_pi);
        if (h < 0.0) {
          h += two_pi;
        }
        float dir = static_cast<float>(h / two_pi);
        if (dir >= 1.0F) {
          dir = 0.0F;
        }
        map.channels[2][i] = dir;
        continue;
      }
      for (const auto & poly : world_map.drivable_polygons) {
        if (point_in_polygon(p, poly)) {
          map.channels[0][i] = 1.0F;
          break;
        }
      }
    }
  }
  return map;
}

SemanticGrid pool_labels(const SemanticGrid & fine, const GridSpec & coarse)
{
  SemanticGrid out(coarse);
  const int n = fine.spec.cells_per_side();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (fine.labels[fine.spec.flat({r, c})] == 0) {
        continue;
      }
      if (auto idx = world_to_cell(cell_to_world({r, c}, fine.spec), coarse)) {
        out.labels[coarse.flat(*idx)] = 1;
      }
    }
  }
  return out;
}

}  // namespace gridcast
