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

// Four-state occupancy filter.
//
// Every cell carries masses (f, s, d, u) = (free, static, dynamic, unknown).
// A scan classifies each cell as HIT (beam endpoint), MISS (traversed) or
// UNOBSERVED, and the cell is updated as follows (primes are posteriors):
//
//   UNOBSERVED:  f' = (1-k) f,  s' = (1-k) s,  d' = (1-k) d,  u' = u + k (1-u)    k = decay
//
//   MISS:        f' = f + m (1-f),  s' = (1-m) s,  d' = (1-m) d,  u' = (1-m) u    m = p_miss
//
//   HIT:         if s + d > 1/2 (persistently occupied):  s += g_s d,  d -= g_s d   g_s = static_gain
//                gain = h (f + u),  f' = (1-h) f,  u' = (1-h) u                      h = p_hit
//                if f > 1/2 before the update (newly occupied free space):
//                  d' = d + g_d gain,  s' = s + (1-g_d) gain                        g_d = dynamic_gain
//                else:
//                  s' = s + gain
//
// Each branch conserves total mass; frames are renormalised afterwards to
// absorb rounding. Occupancy p_occ = s + d therefore moves toward 1 by a
// fraction h of its complement per hit and toward 0 by a fraction m per miss.

#ifndef GRIDCAST__OCCUPANCY_FILTER_HPP_
#define GRIDCAST__OCCUPANCY_FILTER_HPP_

#include <cstdint>
#include <vector>

#include "gridcast/grid.hpp"
#include "gridcast/scenario.hpp"

namespace gridcast
{

struct FilterParams
{
  double p_hit = 0.8;
  double p_miss = 0.3;
  double decay = 0.02;
  double dynamic_gain = 0.9;
  double static_gain = 0.3;

  void validate() const;
};

struct CellMass
{
  double free = 0.0;
  double stat = 0.0;
  double dyn = 0.0;
  double unknown = 1.0;
};

enum class CellObservation : std::uint8_t { kUnobserved = 0, kMiss = 1, kHit = 2 };

/// Single-cell form of the update, shared by the grid update and its tests.
CellMass update_cell(const CellMass & prev, CellObservation obs, const FilterParams & params);

DogmFrame init_frame(const GridSpec & spec);

/// Per-cell observation classes of a scan: Bresenham traversal from the scan
/// origin, the endpoint cell of a return is a hit, traversed cells are misses.
/// A hit from any beam overrides misses from others.
std::vector<CellObservation> rasterize_scan(const LidarScan & scan, const GridSpec & spec);

/// Throws std::invalid_argument when the scan origin lies outside the grid.
DogmFrame update(const DogmFrame & prev, const LidarScan & scan, const FilterParams & params);

struct SequenceOptions
{
  LidarConfig lidar;
  /// Std-dev (m, rad) of the pose error used to register each scan; 0 disables.
  double odometry_noise_sigma = 0.0;
  std::uint64_t odometry_noise_seed = 0;
};

/// Filters frames [first, first + count) of a scenario into `spec`, which the
/// caller anchored at the ego pose of `first`.
std::vector<DogmFrame> run_sequence(const Scenario & scenario, const GridSpec & spec,
                                    const FilterParams & params, int first, int count,
                                    const SequenceOptions & options = {});

}  // namespace gridcast

#endif  // GRIDCAST__OCCUPANCY_FILTER_HPP_
