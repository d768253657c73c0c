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

#ifndef GRIDCAST__GRID_HPP_
#define GRIDCAST__GRID_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gridcast
{

double normalize_angle(double a);

struct Vec2
{
  double x = 0.0;
  double y = 0.0;
};

/// Planar pose. Heading is kept in (-pi, pi].
struct Pose2D
{
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double heading_) : x(x_), y(y_), heading(normalize_angle(heading_)) {}

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose2D &) const = default;
};

struct CellIndex
{
  int row = 0;
  int col = 0;
  bool operator==(const CellIndex &) const = default;
};

/// Square allo-centric grid geometry.
///
/// `anchor` is the world pose of the grid's bottom-left corner; its heading is
/// the grid "up" direction (increasing rows). Columns increase to the right of
/// "up". Row 0 is the bottom edge.
class GridSpec
{
public:
  GridSpec() = default;

  /// Throws std::invalid_argument unless extent/resolution is a positive
  /// integer cell count.
  GridSpec(Pose2D anchor, double extent, double resolution);

  const Pose2D & anchor() const { return anchor_; }
  double extent() const { return extent_; }
  double resolution() const { return resolution_; }
  int cells_per_side() const { return cells_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(cells_) * cells_; }
  std::size_t flat(CellIndex idx) const
  {
    return static_cast<std::size_t>(idx.row) * cells_ + idx.col;
  }

  /// Same anchor and extent, different resolution.
  GridSpec with_resolution(double resolution) const { return {anchor_, extent_, resolution}; }

  /// Grid-local metric coordinates (right, up) of a world point.
  Vec2 to_local(Vec2 world) const;
  Vec2 to_world(Vec2 local) const;

  bool operator==(const GridSpec &) const = default;

private:
  Pose2D anchor_{};
  double extent_ = 1.0;
  double resolution_ = 1.0;
  int cells_ = 1;
};

/// Distance from the ego to the bottom edge of a freshly anchored grid.
inline constexpr double kMetersBehindEgo = 10.0;

/// Grid anchored on the ego: ego laterally centred, `behind` meters above the
/// bottom edge, grid "up" along the ego heading. The anchor stays fixed for
/// the whole sequence.
GridSpec anchor_from_ego(const Pose2D & ego, double extent, double resolution,
                         double behind = kMetersBehindEgo);

/// Cell containing `p`, or nullopt when outside the grid (never clamped).
std::optional<CellIndex> world_to_cell(Vec2 p, const GridSpec & spec);

/// World position of a cell centre. Throws std::invalid_argument when out of range.
Vec2 cell_to_world(CellIndex idx, const GridSpec & spec);

enum DogmChannel : int { kFree = 0, kStatic = 1, kDynamic = 2, kUnknown = 3 };

/// Four-state dynamic occupancy grid. Planes are row-major, row 0 at the bottom.
struct DogmFrame
{
  GridSpec spec;
  std::array<std::vector<float>, 4> planes;

  DogmFrame() = default;
  explicit DogmFrame(const GridSpec & s);

  std::vector<float> & plane(DogmChannel c) { return planes[c]; }
  const std::vector<float> & plane(DogmChannel c) const { return planes[c]; }
  float occupied(std::size_t i) const { return planes[kStatic][i] + planes[kDynamic][i]; }

  /// Largest per-cell deviation of the channel sum from 1.
  double max_normalization_error() const;
  bool probabilities_in_range() const;
};

/// Binary per-cell vehicle labels.
struct SemanticGrid
{
  GridSpec spec;
  std::vector<std::uint8_t> labels;

  SemanticGrid() = default;
  explicit SemanticGrid(const GridSpec & s) : spec(s), labels(s.cell_count(), 0) {}
};

/// Drivable mask, lane-boundary mask and normalised traffic direction.
struct RasterMap
{
  GridSpec spec;
  std::array<std::vector<float>, 3> channels;

  RasterMap() = default;
  explicit RasterMap(const GridSpec & s);
};

/// Vehicle occupancy in [0, 1]; binary for ground truth.
struct VehicleGrid
{
  GridSpec spec;
  std::vector<float> occupancy;

  VehicleGrid() = default;
  explicit VehicleGrid(const GridSpec & s) : spec(s), occupancy(s.cell_count(), 0.0F) {}

  bool is_binary() const;
  std::size_t count_nonzero() const;
};

struct RgbImage
{
  int side = 0;
  std::array<std::vector<float>, 3> channels;
};

/// R = unknown, G = dynamic, B = static. A fully free cell is black.
RgbImage dogm_to_rgb(const DogmFrame & frame);

/// Area-weighted resampling of a square field. Works for any pair of sides,
/// downsampling conserves mass.
std::vector<float> resize_grid(std::span<const float> values, int source_side, int target_side);
std::vector<double> resize_grid(std::span<const double> values, int source_side, int target_side);

}  // namespace gridcast

#endif  // GRIDCAST__GRID_HPP_
