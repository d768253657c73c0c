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

// Prediction scores, per-vehicle retention and the OGM baselines.

#ifndef GRIDCAST__METRICS_HPP_
#define GRIDCAST__METRICS_HPP_

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "gridcast/geometry.hpp"
#include "gridcast/grid.hpp"
#include "gridcast/scenario.hpp"

namespace gridcast
{

/// sum(p g) / sum(p + g - p g); 1 when both grids are empty.
/// Throws std::invalid_argument for a non-binary `gt` or mismatched sizes.
double soft_iou(std::span<const float> pred, std::span<const float> gt);
double soft_iou(const VehicleGrid & pred, const VehicleGrid & gt);

/// |{p > threshold} & {g = 1}| / |{p > threshold} | {g = 1}|; 1 when the union is empty.
double iou_binary(std::span<const float> pred, std::span<const float> gt, double threshold = 0.5);
double iou_binary(const VehicleGrid & pred, const VehicleGrid & gt, double threshold = 0.5);

inline constexpr int kAucThresholds = 100;

/// One point of the precision-recall sweep at threshold 0.01 k (a cell is
/// predicted when p > threshold).
struct PrPoint
{
  double threshold = 0.0;
  double precision = 1.0;  // 1 when nothing is predicted
  double recall = 0.0;
  bool has_predictions = false;
};

std::vector<PrPoint> pr_curve(std::span<const float> pred, std::span<const float> gt);

/// Area under the precision-recall sweep: trapezoids between the recall-sorted
/// points that predict at least one cell, with the curve held flat from the
/// lowest such recall down to 0. Zero when no threshold predicts anything.
/// Empty when `gt` has no positive cell.
std::optional<double> auc_pr(std::span<const float> pred, std::span<const float> gt);
std::optional<double> auc_pr(const VehicleGrid & pred, const VehicleGrid & gt);

inline constexpr double kRetentionThreshold = 0.1;

struct RetentionCounts
{
  int retained = 0;
  int total = 0;
  double fraction() const { return total > 0 ? static_cast<double>(retained) / total : 0.0; }
};

struct RetentionStep
{
  RetentionCounts stat;
  RetentionCounts dyn;
  int excluded = 0;  // perceived vehicles with no footprint on the grid
};

/// Footprint cells of a box on `spec`: cells whose centre is inside, or the
/// cell holding the box centre when no centre is covered. Empty when the box
/// is entirely off the grid.
std::vector<std::size_t> footprint_cells(const GridSpec & spec, const OrientedBox & box);

/// preds[k] is the prediction for scenario frame frames[k]. A perceived
/// vehicle is retained at a step when some footprint cell has p > threshold.
std::vector<RetentionStep> retention(std::span<const VehicleGrid> preds, const Scenario & scenario,
                                     const std::set<int> & perceived, std::span<const int> frames,
                                     double threshold = kRetentionThreshold);

inline constexpr double kCleanupTolerance = 2.0;

/// Keeps occupancy only on drivable cells within `tolerance` meters of some box.
VehicleGrid ogm_cleanup(const VehicleGrid & occupancy, const RasterMap & raster,
                        std::span<const OrientedBox> boxes, double tolerance = kCleanupTolerance);
VehicleGrid ogm_cleanup(const DogmFrame & frame, const RasterMap & raster, std::span<const OrientedBox> boxes,
                        double tolerance = kCleanupTolerance);

/// p_static + p_dynamic per cell.
VehicleGrid occupancy_of(const DogmFrame & frame);

/// Baselines return steps + 1 grids; index k lies k steps after the last
/// input frame, so index 0 is the present.

/// Occupancy of the last input frame, repeated.
std::vector<VehicleGrid> baseline_persistence(std::span<const DogmFrame> inputs, int steps);

struct ConstVelocityParams
{
  int frames_per_step = 5;
  double dynamic_threshold = 0.15;
  double max_match_distance = 3.0;  // meters between consecutive frames
};

/// Dynamic clusters (8-connected cells with p_dynamic > threshold) of the last
/// frame are matched to the nearest cluster centroid of the previous frame and
/// their dynamic mass is translated by the per-frame displacement. Static mass
/// stays in place. Step k is frames_per_step * k frames after the last input.
std::vector<VehicleGrid> baseline_const_velocity(std::span<const DogmFrame> inputs, int steps,
                                                 const ConstVelocityParams & params = {});

}  // namespace gridcast

#endif  // GRIDCAST__METRICS_HPP_
