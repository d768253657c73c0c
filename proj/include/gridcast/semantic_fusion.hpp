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

#ifndef GRIDCAST__SEMANTIC_FUSION_HPP_
#define GRIDCAST__SEMANTIC_FUSION_HPP_

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcast/grid.hpp"
#include "gridcast/scenario.hpp"

namespace gridcast
{

inline constexpr double kOccupiedThreshold = 0.3;

/// label = 1 iff (p_static > 0.3 or p_dynamic > 0.3) and the semantic source marks a vehicle.
SemanticGrid associate_labels(const DogmFrame & frame, const VehicleGrid & semantics,
                              double threshold = kOccupiedThreshold);

/// Cells whose centre lies within half a cell diagonal of a footprint count as
/// inside it, so beam endpoints on the box outline are attributed to the box.
double footprint_margin(const GridSpec & spec);

/// Ids of vehicles (ego excluded) with p_static + p_dynamic > threshold in any
/// footprint cell of any input frame. frames[k] corresponds to scenario frame
/// first_frame + k.
std::set<int> perceived_vehicles(std::span<const DogmFrame> frames, const Scenario & scenario,
                                 const GridSpec & spec, int first_frame,
                                 double threshold = kOccupiedThreshold);

struct TargetOptions
{
  bool include_ego = true;
  /// Include every annotated vehicle, not only perceived ones.
  bool comparison_mode = false;
};

/// One binary grid per requested scenario frame: perceived footprints plus the ego box.
std::vector<VehicleGrid> build_targets(const Scenario & scenario, const GridSpec & spec,
                                       const std::set<int> & perceived,
                                       std::span<const int> frames, const TargetOptions & options = {});

/// Detector-quality label noise. Defaults are fitted by `gridcast calibrate-noise`.
struct NoiseParams
{
  double dropout_prob = 0.0;      // whole-vehicle misses
  double erode_prob = 0.0;        // per-vehicle probability of shrinking instead of growing
  int jitter_cells = 0;           // boundary erosion/dilation radius (cells)
  double fp_per_vehicle = 0.0;    // Poisson mean of false-positive blobs per true vehicle
  double fp_length = 4.0;         // meters
  double fp_width = 1.8;
  double fp_offset_min = 2.0;     // distance of a blob from the vehicle it clusters around
  double fp_offset_max = 8.0;

  bool is_zero() const
  {
    return dropout_prob == 0.0 && jitter_cells == 0 && fp_per_vehicle == 0.0;
  }

  static NoiseParams calibrated();
};

nlohmann::json noise_params_to_json(const NoiseParams & p);
NoiseParams noise_params_from_json(const nlohmann::json & j);

VehicleGrid corrupt_semantics(const VehicleGrid & gt, std::uint64_t seed, const NoiseParams & noise);

struct NoiseQuality
{
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Pooled IoU / precision of corrupted against clean grids.
NoiseQuality measure_noise(std::span<const VehicleGrid> clean, std::span<const VehicleGrid> noisy);

struct NoiseFit
{
  NoiseParams params;
  NoiseQuality quality;
};

/// Grid search over dropout, erosion, jitter and false-positive rate for the
/// parameters whose pooled quality on `clean` is closest to the targets.
NoiseFit fit_noise(std::span<const VehicleGrid> clean, std::uint64_t seed, double target_iou = 0.53,
                   double target_precision = 0.77);

RasterMap rasterize_map(const WorldMap & world_map, const GridSpec & spec);

/// Any-pooling of binary labels to a coarser grid of the same extent.
SemanticGrid pool_labels(const SemanticGrid & fine, const GridSpec & coarse);

}  // namespace gridcast

#endif  // GRIDCAST__SEMANTIC_FUSION_HPP_
