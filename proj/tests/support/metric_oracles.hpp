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

// Straightforward reference implementations used to cross-check the metrics.

#ifndef GRIDCAST__TESTS__METRIC_ORACLES_HPP_
#define GRIDCAST__TESTS__METRIC_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "gridcast/grid.hpp"

namespace gridcast::testing::oracle
{

inline double soft_iou(const std::vector<float> & pred, const std::vector<float> & gt)
{
  long double sp = 0, sg = 0, spg = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sp += pred[i];
    sg += gt[i];
    spg += static_cast<long double>(pred[i]) * gt[i];
  }
  const long double denom = sp + sg - spg;
  return denom == 0 ? 1.0 : static_cast<double>(spg / denom);
}

inline double iou_binary(const std::vector<float> & pred, const std::vector<float> & gt)
{
  int inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] > 0.5;
    const bool g = gt[i] == 1.0F;
    if (p && g) ++inter;
    if (p || g) ++uni;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

inline std::optional<double> auc_pr(const std::vector<float> & pred, const std::vector<float> & gt)
{
  const long positives = std::count(gt.begin(), gt.end(), 1.0F);
  if (positives == 0) {
    return std::nullopt;
  }
  std::vector<std::pair<double, double>> pts;  // (recall, precision), from the highest threshold down
  for (int k = 99; k >= 0; --k) {
    const double t = 0.01 * k;
    long tp = 0, predicted = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] > t) {
        ++predicted;
        if (gt[i] == 1.0F) ++tp;
      }
    }
    if (predicted > 0) {
      pts.emplace_back(static_cast<double>(tp) / positives, static_cast<double>(tp) / predicted);
    }
  }
  if (pts.empty()) {
    return 0.0;
  }
  std::stable_sort(pts.begin(), pts.end(), [](auto & a, auto & b) { return a.first < b.first; });
  pts.insert(pts.begin(), {0.0, pts.front().second});
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
  }
  return area;
}

/// Distance from p to the axis-aligned rectangle [lo, hi].
inline double axis_aligned_distance(Vec2 p, Vec2 lo, Vec2 hi)
{
  const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
  const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace gridcast::testing::oracle

#endif  // GRIDCAST__TESTS__METRIC_ORACLES_HPP_
