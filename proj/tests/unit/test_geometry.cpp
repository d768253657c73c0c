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


#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gridcast/geometry.hpp"

using namespace gridcast;

namespace
{

// brute force ray march against the rectangle, fine step then bisection
std::optional<double> march(Vec2 o, Vec2 d, const OrientedBox & box, double max_t)
{
  const bool inside0 = box.contains(o);
  double prev = 0.0;
  for (double t = 1e-3; t <= max_t; t += 1e-3) {
    if (box.contains({o.x + t * d.x, o.y + t * d.y}) != inside0) {
      double lo = prev, hi = t;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (box.contains({o.x + mid * d.x, o.y + mid * d.y}) != inside0 ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = t;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("ray-box intersection, axis aligned box ahead")
{
  const OrientedBox box{{10.0, 0.0, 0.0}, 4.0, 2.0};
  const auto t = ray_box_intersection({0, 0}, {1, 0}, box);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(8.0));
  CHECK_FALSE(ray_box_intersection({0, 0}, {-1, 0}, box));
  CHECK_FALSE(ray_box_intersection({0, 0}, {0, 1}, box));
}

TEST_CASE("ray-box intersection agrees with ray marching")
{
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    const OrientedBox box{{u(rng), u(rng), ang(rng)}, 2.0 + std::abs(u(rng)) / 3, 1.0 + std::abs(u(rng)) / 10};
    const double a = ang(rng);
    const Vec2 d{std::cos(a), std::sin(a)};
    const auto exact = ray_box_intersection({0, 0}, d, box);
    const auto ref = march({0, 0}, d, box, 40.0);
    REQUIRE(exact.has_value() == ref.has_value());
    if (exact) {
      ++hits;
      CHECK(*exact == doctest::Approx(*ref).epsilon(1e-6));
    }
  }
  CHECK(hits > 10);
}

TEST_CASE("oriented box overlap and containment")
{
  const OrientedBox a{{0, 0, 0}, 4, 2};
  CHECK(boxes_overlap(a, {{3.9, 0, 0}, 4, 2}));
  CHECK_FALSE(boxes_overlap(a, {{4.1, 0, 0}, 4, 2}));
  CHECK(boxes_overlap(a, {{0, 2.5, std::numbers::pi / 2}, 4, 2}));
  CHECK_FALSE(boxes_overlap(a, {{3.5, 2.5, std::numbers::pi / 4}, 1, 1}));
  CHECK(a.contains({1.9, 0.9}));
  CHECK_FALSE(a.contains({2.1, 0.0}));
  CHECK(a.contains({2.1, 0.0}, 0.2));
  CHECK(a.distance({5, 0}) == doctest::Approx(3.0));
  CHECK(a.distance({5, 4}) == doctest::Approx(std::sqrt(18.0)));
  CHECK(a.distance({0.5, 0.5}) == 0.0);
}

TEST_CASE("point utilities")
{
  CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 4}, {0, 0}, {0, 0}) == doctest::Approx(5.0));
  CHECK(point_segment_distance({2, 1}, {-1, 0}, {1, 0}) == doctest::Approx(std::sqrt(2.0)));
  const std::vector<Vec2> square{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(point_in_polygon({1, 1}, square));
  CHECK_FALSE(point_in_polygon({3, 1}, square));
}

TEST_CASE("polyline arc length parametrisation")
{
  const Polyline line({{0, 0}, {10, 0}, {10, 10}});
  CHECK(line.length() == doctest::Approx(20.0));
  const Pose2D p = line.pose_at(15.0);
  CHECK(p.x == doctest::Approx(10.0));
  CHECK(p.y == doctest::Approx(5.0));
  CHECK(p.heading == doctest::Approx(std::numbers::pi / 2));
  const Pose2D before = line.pose_at(-2.0);
  CHECK(before.x == doctest::Approx(-2.0));
  const auto [d, h] = line.nearest({5.0, -3.0});
  CHECK(d == doctest::Approx(3.0));
  CHECK(h == doctest::Approx(0.0));
}

TEST_CASE("for_each_cell_in_box matches brute force point-in-rectangle")
{
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(5.0, 15.0);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  const GridSpec spec({0, 0, std::numbers::pi / 2}, 20.0, 0.25);
  for (int trial = 0; trial < 30; ++trial) {
    const OrientedBox box{{u(rng), u(rng), ang(rng)}, 4.5, 1.8};
    std::vector<int> seen(spec.cell_count(), 0);
    for_each_cell_in_box(spec, box, 0.1, [&](CellIndex, std::size_t i) { seen[i] += 1; });
    for (int r = 0; r < spec.cells_per_side(); ++r) {
      for (int c = 0; c < spec.cells_per_side(); ++c) {
        const Vec2 centre = cell_to_world({r, c}, spec);
        const Vec2 b = box.to_box(centre);
        const bool in = std::abs(b.x) <= 2.25 + 0.1 && std::abs(b.y) <= 0.9 + 0.1;
        CHECK(seen[spec.flat({r, c})] == (in ? 1 : 0));
      }
    }
  }
}
