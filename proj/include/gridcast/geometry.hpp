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

#ifndef GRIDCAST__GEOMETRY_HPP_
#define GRIDCAST__GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <vector>

#include "gridcast/grid.hpp"

namespace gridcast
{

/// Rectangle centred on `pose`, `length` along the heading, `width` across it.
struct OrientedBox
{
  Pose2D pose;
  double length = 0.0;
  double width = 0.0;

  std::array<Vec2, 4> corners() const;
  /// Box-frame coordinates (along heading, to the left) of a world point.
  Vec2 to_box(Vec2 p) const;
  bool contains(Vec2 p, double margin = 0.0) const;
  /// Euclidean distance to the rectangle, zero inside.
  double distance(Vec2 p) const;
};

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

/// Smallest t >= 0 with origin + t * dir on the box boundary, for a unit `dir`.
std::optional<double> ray_box_intersection(Vec2 origin, Vec2 dir, const OrientedBox & box);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

/// Calls fn(CellIndex, flat) for every cell whose centre lies in `box` grown by
/// `margin` along each box axis.
template <typename Fn>
void for_each_cell_in_box(const GridSpec & spec, const OrientedBox & box, double margin, Fn && fn);

/// Arc-length parametrised polyline.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2> & points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  /// Position and tangent heading at arc length s (clamped to the ends, extrapolated linearly).
  Pose2D pose_at(double s) const;
  /// Distance to the polyline and the heading of the nearest segment.
  std::pair<double, double> nearest(Vec2 p) const;

private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------

template <typename Fn>
void for_each_cell_in_box(const GridSpec & spec, const OrientedBox & box, double margin, Fn && fn)
{
  const auto corners = box.corners();
  const double res = spec.resolution();
  const int n = spec.cells_per_side();
  double min_c = 1e300, max_c = -1e300, min_r = 1e300, max_r = -1e300;
  for (const Vec2 & c : corners) {
    const Vec2 l = spec.to_local(c);
    min_c = std::min(min_c, l.x);
    max_c = std::max(max_c, l.x);
    min_r = std::min(min_r, l.y);
    max_r = std::max(max_r, l.y);
  }
  const double pad = margin * 1.5 + res;
  const int c0 = std::max(0, static_cast<int>((min_c - pad) / res));
  const int c1 = std::min(n - 1, static_cast<int>((max_c + pad) / res));
  const int r0 = std::max(0, static_cast<int>((min_r - pad) / res));
  const int r1 = std::min(n - 1, static_cast<int>((max_r + pad) / res));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Vec2 centre = spec.to_world({(c + 0.5) * res, (r + 0.5) * res});
      if (box.contains(centre, margin)) {
        const CellIndex idx{r, c};
        fn(idx, spec.flat(idx));
      }
    }
  }
}

}  // namespace gridcast

#endif  // GRIDCAST__GEOMETRY_HPP_
