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

#include "gridcast/occupancy_filter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace gridcast
{

void FilterParams::validate() const
{
  for (double v : {p_hit, p_miss, decay, dynamic_gain, static_gain}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("filter parameters must lie in [0, 1]");
    }
  }
}

CellMass update_cell(const CellMass & prev, CellObservation obs, const FilterParams & p)
{
  CellMass c = prev;
  switch (obs) {
    case CellObservation::kUnobserved: {
      const double k = p.decay;
      c.free = (1.0 - k) * prev.free;
      c.stat = (1.0 - k) * prev.stat;
      c.dyn = (1.0 - k) * prev.dyn;
      c.unknown = prev.unknown + k * (1.0 - prev.unknown);
      break;
    }
    case CellObservation::kMiss: {
      const double m = p.p_miss;
      c.free = prev.free + m * (1.0 - prev.free);
      c.stat = (1.0 - m) * prev.stat;
      c.dyn = (1.0 - m) * prev.dyn;
      c.unknown = (1.0 - m) * prev.unknown;
      break;
    }
    case CellObservation::kHit: {
      if (prev.stat + prev.dyn > 0.5) {
        const double moved = p.static_gain * c.dyn;
        c.dyn -= moved;
        c.stat += moved;
      }
      const double h = p.p_hit;
      const double gain = h * (prev.free + prev.unknown);
      c.free = (1.0 - h) * prev.free;
      c.unknown = (1.0 - h) * prev.unknown;
      if (prev.free > 0.5) {
        c.dyn += p.dynamic_gain * gain;
        c.stat += (1.0 - p.dynamic_gain) * gain;
      } else {
        c.stat += gain;
      }
      break;
    }
  }
  // renormalise to absorb rounding
  c.free = std::clamp(c.free, 0.0, 1.0);
  c.stat = std::clamp(c.stat, 0.0, 1.0);
  c.dyn = std::clamp(c.dyn, 0.0, 1.0);
  c.unknown = std::clamp(c.unknown, 0.0, 1.0);
  const double sum = c.free + c.stat + c.dyn + c.unknown;
  if (sum > 0.0) {
    c.free /= sum;
    c.stat /= sum;
    c.dyn /= sum;
    c.unknown /= sum;
  } else {
    c = CellMass{};
  }
  return c;
}

DogmFrame init_frame(const GridSpec & spec)
{
  DogmFrame f(spec);
  std::fill(f.plane(kUnknown).begin(), f.plane(kUnknown).end(), 1.0F);
  return f;
}

std::vector<CellObservation> rasterize_scan(const LidarScan & scan, const GridSpec & spec)
{
  const int n = spec.cells_per_side();
  const double res = spec.resolution();
  std::vector<CellObservation> obs(spec.cell_count(), CellObservation::kUnobserved);
  const Vec2 o_local = spec.to_local(scan.origin.position());
  const int r0 = static_cast<int>(std::floor(o_local.y / res));
  const int c0 = static_cast<int>(std::floor(o_local.x / res));
  auto inside = [n](int r, int c) { return r >= 0 && c >= 0 && r < n && c < n; };
  if (!inside(r0, c0)) {
    throw std::invalid_argument("scan origin lies outside the grid");
  }

  for (int b = 0; b < scan.beam_count; ++b) {
    const double a = scan.beam_angle(b);
    const bool hit = scan.is_return(b);
    const double range = hit ? scan.ranges[static_cast<std::size_t>(b)] : scan.max_range;
    const Vec2 end_world{scan.origin.x + range * std::cos(a), scan.origin.y + range * std::sin(a)};
    const Vec2 e_local = spec.to_local(end_world);
    const int r1 = static_cast<int>(std::floor(e_local.y / res));
    const int c1 = static_cast<int>(std::floor(e_local.x / res));

    // Bresenham from (r0, c0) to (r1, c1)
    const int dc = std::abs(c1 - c0);
    const int dr = -std::abs(r1 - r0);
    const int sc = c0 < c1 ? 1 : -1;
    const int sr = r0 < r1 ? 1 : -1;
    int err = dc + dr;
    int r = r0;
    int c = c0;
    while (true) {
      if (!inside(r, c)) {
        break;
      }
      const bool last = (r == r1 && c == c1);
      auto & cell = obs[static_cast<std::size_t>(r) * n + c];
      if (last && hit) {
        cell = CellObservation::kHit;
      } else if (cell != CellObservation::kHit) {
        cell = CellObservation::kMiss;
      }
      if (last) {
        break;
      }
      const int e2 = 2 * err;
      if (e2 >= dr) {
        err += dr;
        c += sc;
      }
      if (e2 <= dc) {
        err += dc;
        r += sr;
      }
    }
  }
  return obs;
}

DogmFrame update(const DogmFrame & prev, const LidarScan & scan, const FilterParams & params)
{
  params.validate();
  const auto obs = rasterize_scan(scan, prev.spec);
  DogmFrame next(prev.spec);
  const std::size_t n = prev.spec.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    const CellMass before{prev.planes[kFree][i], prev.planes[kStatic][i], prev.planes[kDynamic][i],
                          prev.planes[kUnknown][i]};
    const CellMass after = update_cell(before, obs[i], params);
    next.planes[kFree][i] = static_cast<float>(after.free);
    next.planes[kStatic][i] = static_cast<float>(after.stat);
    next.planes[kDynamic][i] = static_cast<float>(after.dyn);
    next.planes[kUnknown][i] = static_cast<float>(after.unknown);
  }
  return next;
}

std::vector<DogmFrame> run_sequence(const Scenario & scenario, const GridSpec & spec,
                                    const FilterParams & params, int first, int count,
                                    const SequenceOptions & options)
{
  if (first < 0 || count < 1 || first + count > scenario.duration_frames) {
    throw std::invalid_argument("run_sequence: frame range outside scenario");
  }
  std::mt19937_64 rng(options.odometry_noise_seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<DogmFrame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  DogmFrame state = init_frame(spec);
  for (int f = first; f < first + count; ++f) {
    LidarConfig lidar = options.lidar;
    lidar.noise_seed = options.lidar.noise_seed ^ (scenario.seed * 1315423911ULL);
    LidarScan scan = raycast(scenario, f, lidar);
    if (options.odometry_noise_sigma > 0.0) {
      // the scan is measured at the true pose but registered at a perturbed one
      const double s = options.odometry_noise_sigma;
      scan.origin = Pose2D{scan.origin.x + s * noise(rng), scan.origin.y + s * noise(rng),
                           scan.origin.heading + 0.1 * s * noise(rng)};
    }
    state = update(state, scan, params);
    frames.push_back(state);
  }
  return frames;
}

}  // namespace gridcast
