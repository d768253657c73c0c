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

#include "gridcast/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridcast
{

std::array<Vec2, 4> OrientedBox::corners() const
{
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  auto at = [&](double a, double b) {
    return Vec2{pose.x + a * c - b * s, pose.y + a * s + b * c};
  };
  return {at(hl, hw), at(-hl, hw), at(-hl, -hw), at(hl, -hw)};
}

Vec2 OrientedBox::to_box(Vec2 p) const
{
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  const double dx = p.x - pose.x;
  const double dy = p.y - pose.y;
  return {dx * c + dy * s, -dx * s + dy * c};
}

bool OrientedBox::contains(Vec2 p, double margin) const
{
  const Vec2 b = to_box(p);
  return std::abs(b.x) <= 0.5 * length + margin && std::abs(b.y) <= 0.5 * width + margin;
}

double OrientedBox::distance(Vec2 p) const
{
  const Vec2 b = to_box(p);
  const double dx = std::max(0.0, std::abs(b.x) - 0.5 * length);
  const double dy = std::max(0.0, std::abs(b.y) - 0.5 * width);
  return std::hypot(dx, dy);
}

namespace
{

void project(const std::array<Vec2, 4> & pts, Vec2 axis, double & lo, double & hi)
{
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const Vec2 & p : pts) {
    const double d = p.x * axis.x + p.y * axis.y;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
}

}  // namespace

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {
    Vec2{std::cos(a.pose.heading), std::sin(a.pose.heading)},
    Vec2{-std::sin(a.pose.heading), std::cos(a.pose.heading)},
    Vec2{std::cos(b.pose.heading), std::sin(b.pose.heading)},
    Vec2{-std::sin(b.pose.heading), std::cos(b.pose.heading)}};
  for (const Vec2 & axis : axes) {
    double a_lo, a_hi, b_lo, b_hi;
    project(ca, axis, a_lo, a_hi);
    project(cb, axis, b_lo, b_hi);
    if (a_hi < b_lo || b_hi < a_lo) {
      return false;
    }
  }
  return true;
}

std::optional<double> ray_box_intersection(Vec2 origin, Vec2 dir, const OrientedBox & box)
{
  // slab test in the box frame
  const Vec2 o = box.to_box(origin);
  const double c = std::cos(box.pose.heading);
  const double s = std::sin(box.pose.heading);
  const Vec2 d{dir.x * c + dir.y * s, -dir.x * s + dir.y * c};
  const double half[2] = {0.5 * box.length, 0.5 * box.width};
  const double oo[2] = {o.x, o.y};
  const double dd[2] = {d.x, d.y};
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    if (std::abs(dd[k]) < 1e-15) {
      if (std::abs(oo[k]) > half[k]) {
        return std::nullopt;
      }
      continue;
    }
    double t0 = (-half[k] - oo[k]) / dd[k];
    double t1 = (half[k] - oo[k]) / dd[k];
    if (t0 > t1) {
      std::swap(t0, t1);
    }
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit || t_exit < 0.0) {
    return std::nullopt;
  }
  // origin inside the box: report the exit point
  return t_enter >= 0.0 ? t_enter : t_exit;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon)
{
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = polygon[i];
    const Vec2 & b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw std::invalid_argument("polyline needs at least two points");
  }
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double d = std::hypot(points_[i].x - points_[i - 1].x, points_[i].y - points_[i - 1].y);
    if (d <= 0.0) {
      throw std::invalid_argument("polyline has repeated consecutive points");
    }
    cumulative_.push_back(cumulative_.back() + d);
  }
}

Pose2D Polyline::pose_at(double s) const
{
  std::size_t seg = 0;
  if (s >= cumulative_.back()) {
    seg = points_.size() - 2;
  } else if (s > 0.0) {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
  }
  const Vec2 & a = points_[seg];
  const Vec2 & b = points_[seg + 1];
  const double len = cumulative_[seg + 1] - cumulative_[seg];
  const double t = (s - cumulative_[seg]) / len;
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), std::atan2(b.y - a.y, b.x - a.x)};
}

std::pair<double, double> Polyline::nearest(Vec2 p) const
{
  double best = std::numeric_limits<double>::infinity();
  double heading = 0.0;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const double d = point_segment_distance(p, points_[i], points_[i + 1]);
    if (d < best) {
      best = d;
      heading = std::atan2(points_[i + 1].y - points_[i].y, points_[i + 1].x - points_[i].x);
    }
  }
  return {best, heading};
}

}  // namespace gridcast
