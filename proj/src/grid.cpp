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

#include "gridcast/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gridcast
{

double normalize_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

GridSpec::GridSpec(Pose2D anchor, double extent, double resolution)
: anchor_(anchor), extent_(extent), resolution_(resolution)
{
  if (!(extent > 0.0) || !(resolution > 0.0)) {
    throw std::invalid_argument(
      "grid extent and resolution must be positive (extent=" + std::to_string(extent) +
      ", resolution=" + std::to_string(resolution) + ")");
  }
  const double ratio = extent / resolution;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument(
      "resolution " + std::to_string(resolution) + " does not divide extent " +
      std::to_string(extent) + " into an integer cell count");
  }
  cells_ = static_cast<int>(rounded);
}

Vec2 GridSpec::to_local(Vec2 world) const
{
  const double c = std::cos(anchor_.heading);
  const double s = std::sin(anchor_.heading);
  const double dx = world.x - anchor_.x;
  const double dy = world.y - anchor_.y;
  // up = (c, s), right = (s, -c)
  return {dx * s - dy * c, dx * c + dy * s};
}

Vec2 GridSpec::to_world(Vec2 local) const
{
  const double c = std::cos(anchor_.heading);
  const double s = std::sin(anchor_.heading);
  return {anchor_.x + local.x * s + local.y * c, anchor_.y - local.x * c + local.y * s};
}

GridSpec anchor_from_ego(const Pose2D & ego, double extent, double resolution, double behind)
{
  if (!(extent > 0.0) || !(resolution > 0.0)) {
    throw std::invalid_argument("anchor_from_ego: extent and resolution must be positive");
  }
  const double c = std::cos(ego.heading);
  const double s = std::sin(ego.heading);
  const double half = 0.5 * extent;
  // corner = ego - half * right - behind * up
  const Pose2D corner{ego.x - half * s - behind * c, ego.y + half * c - behind * s, ego.heading};
  return GridSpec(corner, extent, resolution);
}

std::optional<CellIndex> world_to_cell(Vec2 p, const GridSpec & spec)
{
  const Vec2 local = spec.to_local(p);
  const double res = spec.resolution();
  const double col = std::floor(local.x / res);
  const double row = std::floor(local.y / res);
  const int n = spec.cells_per_side();
  if (!(col >= 0.0) || !(row >= 0.0) || col >= n || row >= n) {
    return std::nullopt;
  }
  return CellIndex{static_cast<int>(row), static_cast<int>(col)};
}

Vec2 cell_to_world(CellIndex idx, const GridSpec & spec)
{
  const int n = spec.cells_per_side();
  if (idx.row < 0 || idx.col < 0 || idx.row >= n || idx.col >= n) {
    throw std::invalid_argument(
      "cell (" + std::to_string(idx.row) + ", " + std::to_string(idx.col) +
      ") outside a grid of side " + std::to_string(n));
  }
  const double res = spec.resolution();
  return spec.to_world({(idx.col + 0.5) * res, (idx.row + 0.5) * res});
}

DogmFrame::DogmFrame(const GridSpec & s) : spec(s)
{
  for (auto & p : planes) {
    p.assign(s.cell_count(), 0.0F);
  }
}

double DogmFrame::max_normalization_error() const
{
  double worst = 0.0;
  const std::size_t n = spec.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double sum = static_cast<double>(planes[0][i]) + planes[1][i] + planes[2][i] + planes[3][i];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

bool DogmFrame::probabilities_in_range() const
{
  for (const auto & p : planes) {
    for (float v : p) {
      if (!(v >= 0.0F && v <= 1.0F)) {
        return false;
      }
    }
  }
  return true;
}

RasterMap::RasterMap(const GridSpec & s) : spec(s)
{
  for (auto & c : channels) {
    c.assign(s.cell_count(), 0.0F);
  }
}

bool VehicleGrid::is_binary() const
{
  return std::all_of(occupancy.begin(), occupancy.end(), [](float v) { return v == 0.0F || v == 1.0F; });
}

std::size_t VehicleGrid::count_nonzero() const
{
  return static_cast<std::size_t>(
    std::count_if(occupancy.begin(), occupancy.end(), [](float v) { return v != 0.0F; }));
}

RgbImage dogm_to_rgb(const DogmFrame & frame)
{
  RgbImage img;
  img.side = frame.spec.cells_per_side();
  img.channels[0] = frame.plane(kUnknown);
  img.channels[1] = frame.plane(kDynamic);
  img.channels[2] = frame.plane(kStatic);
  return img;
}

namespace
{

struct Tap
{
  int source;
  double weight;
};

// Overlap weights of each target cell over the source cells, normalised by the
// target cell width so that each row of weights sums to one.
std::vector<std::vector<Tap>> area_taps(int source, int target)
{
  std::vector<std::vector<Tap>> taps(target);
  const double scale = static_cast<double>(source) / target;
  for (int t = 0; t < target; ++t) {
    const double lo = t * scale;
    const double hi = (t + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(source - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int s = first; s <= last; ++s) {
      const double overlap = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      if (overlap > 0.0) {
        taps[t].push_back({s, overlap / scale});
      }
    }
  }
  return taps;
}

template <typename T>
std::vector<T> resize_impl(std::span<const T> values, int source_side, int target_side)
{
  if (source_side < 1 || target_side < 1) {
    throw std::invalid_argument("resize_grid: sides must be >= 1");
  }
  if (values.size() != static_cast<std::size_t>(source_side) * source_side) {
    throw std::invalid_argument("resize_grid: value count does not match source side");
  }
  if (source_side == target_side) {
    return {values.begin(), values.end()};
  }
  const auto taps = area_taps(source_side, target_side);

  // columns first, then rows
  std::vector<double> tmp(static_cast<std::size_t>(source_side) * target_side, 0.0);
  for (int r = 0; r < source_side; ++r) {
    const T * row = values.data() + static_cast<std::size_t>(r) * source_side;
    for (int c = 0; c < target_side; ++c) {
      double acc = 0.0;
      for (const Tap & tap : taps[c]) {
        acc += tap.weight * row[tap.source];
      }
      tmp[static_cast<std::size_t>(r) * target_side + c] = acc;
    }
  }
  std::vector<T> out(static_cast<std::size_t>(target_side) * target_side);
  for (int r = 0; r < target_side; ++r) {
    for (int c = 0; c < target_side; ++c) {
      double acc = 0.0;
      for (const Tap & tap : taps[r]) {
        acc += tap.weight * tmp[static_cast<std::size_t>(tap.source) * target_side + c];
      }
      out[static_cast<std::size_t>(r) * target_side + c] = static_cast<T>(acc);
    }
  }
  return out;
}

}  // namespace

std::vector<float> resize_grid(std::span<const float> values, int source_side, int target_side)
{
  return resize_impl(values, source_side, target_side);
}

std::vector<double> resize_grid(std::span<const double> values, int source_side, int target_side)
{
  return resize_impl(values, source_side, target_side);
}

}  // namespace gridcast
