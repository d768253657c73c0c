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

#include "gridcast/scenario.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace gridcast
{

namespace
{

constexpr double kLaneWidth = 3.5;
constexpr double kParkingWidth = 2.5;
constexpr double kClearance = 0.3;

using Rng = std::mt19937_64;

double uniform(Rng & rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng & rng, int lo, int hi)
{
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(Rng & rng, double p)
{
  return uniform(rng, 0.0, 1.0) < p;
}

Vec2 right_normal(double heading)
{
  return {std::sin(heading), -std::cos(heading)};
}

// Lane geometry in the generator's local frame, before the optional rigid transform.
struct LaneInfo
{
  Polyline path;
  bool forward = true;       // same direction as the ego
  double offset = 0.0;       // lateral offset of a parallel lane (straight roads)
  int neighbour_right = -1;  // same-direction neighbours, for lane changes
  int neighbour_left = -1;
  bool allows_lane_change = false;
};

struct Layout
{
  std::vector<LaneInfo> lanes;
  std::vector<std::vector<Vec2>> drivable;
  // candidate parking spots and obstacle bands expressed as (path, lateral offset, s range)
  struct Band
  {
    Polyline path;
    double offset_lo;
    double offset_hi;
    double s_lo;
    double s_hi;
  };
  std::vector<Band> parking;
  std::vector<Band> roadside;
  int ego_lane = 0;
  double ego_s0 = 0.0;
};

std::vector<Vec2> offset_points(const std::vector<Vec2> & pts, double offset)
{
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 & a = pts[i == 0 ? 0 : i - 1];
    const Vec2 & b = pts[i == 0 ? 1 : i];
    const Vec2 n = right_normal(std::atan2(b.y - a.y, b.x - a.x));
    out.push_back({pts[i].x + offset * n.x, pts[i].y + offset * n.y});
  }
  return out;
}

std::vector<Vec2> strip_polygon(const std::vector<Vec2> & ref, double lo, double hi)
{
  auto inner = offset_points(ref, lo);
  auto outer = offset_points(ref, hi);
  std::vector<Vec2> poly(inner.begin(), inner.end());
  poly.insert(poly.end(), outer.rbegin(), outer.rend());
  return poly;
}

std::vector<Vec2> sub_path(const Polyline & path, double s_lo, double s_hi, double step = 1.0)
{
  std::vector<Vec2> pts;
  for (double s = s_lo; s < s_hi; s += step) {
    pts.push_back(path.pose_at(s).position());
  }
  pts.push_back(path.pose_at(s_hi).position());
  return pts;
}

// Builds parallel lanes along a reference path through the origin. The ego
// lane is the reference; forward lanes lie to its right and left per index.
Layout parallel_road(Rng & rng, const Polyline & reference, double s_begin, double s_end,
                     double s_ego, bool allow_lane_change)
{
  Layout layout;
  const int n_fwd = uniform_int(rng, 1, 2);
  const int n_bwd = uniform_int(rng, 1, 2);
  const int ego_k = uniform_int(rng, 0, n_fwd - 1);
  // lane k forward at +(k + 0.5) w from the road centre line (to the right), backward at -(k + 0.5) w
  const double centre_offset = -(ego_k + 0.5) * kLaneWidth;
  const auto ref_pts = sub_path(reference, s_begin, s_end);

  for (int k = 0; k < n_fwd; ++k) {
    LaneInfo lane;
    const double off = centre_offset + (k + 0.5) * kLaneWidth;
    lane.path = Polyline(offset_points(ref_pts, off));
    lane.forward = true;
    lane.offset = off;
    lane.allows_lane_change = allow_lane_change;
    lane.neighbour_right = k + 1 < n_fwd ? k + 1 : -1;
    lane.neighbour_left = k > 0 ? k - 1 : -1;
    layout.lanes.push_back(std::move(lane));
  }
  for (int k = 0; k < n_bwd; ++k) {
    LaneInfo lane;
    const double off = centre_offset - (k + 0.5) * kLaneWidth;
    auto pts = offset_points(ref_pts, off);
    std::reverse(pts.begin(), pts.end());
    lane.path = Polyline(std::move(pts));
    lane.forward = false;
    lane.offset = off;
    lane.allows_lane_change = allow_lane_change;
    // seen from a backward lane, "right" points away from the centre line
    lane.neighbour_right = k + 1 < n_bwd ? n_fwd + k + 1 : -1;
    lane.neighbour_left = k > 0 ? n_fwd + k - 1 : -1;
    layout.lanes.push_back(std::move(lane));
  }
  layout.ego_lane = ego_k;
  layout.ego_s0 = s_ego - s_begin;

  const double right_edge = centre_offset + n_fwd * kLaneWidth;
  const double left_edge = centre_offset - n_bwd * kLaneWidth;
  const Polyline ref_sub(ref_pts);
  const double len = ref_sub.length();
  layout.drivable.push_back(strip_polygon(ref_pts, right_edge, right_edge + kParkingWidth));
  layout.drivable.push_back(strip_polygon(ref_pts, left_edge - kParkingWidth, left_edge));
  layout.parking.push_back({ref_sub, right_edge, right_edge + kParkingWidth, 0.0, len});
  layout.parking.push_back({ref_sub, left_edge - kParkingWidth, left_edge, 0.0, len});
  layout.roadside.push_back({ref_sub, right_edge + kParkingWidth + 0.8, right_edge + kParkingWidth + 8.0, 0.0, len});
  layout.roadside.push_back({ref_sub, left_edge - kParkingWidth - 8.0, left_edge - kParkingWidth - 0.8, 0.0, len});
  return layout;
}

Layout straight_layout(Rng & rng, const ScenarioConfig & cfg)
{
  const Polyline reference({{0.0, -300.0}, {0.0, 300.0}});
  // reference arc length 0 is at y = -300; the ego starts at y = 0
  return parallel_road(rng, reference, 300.0 - 80.0, 300.0 + cfg.road_length, 300.0, true);
}

Layout curve_layout(Rng & rng, const ScenarioConfig & cfg)
{
  const double radius = uniform(rng, 50.0, 100.0);
  const double side = chance(rng, 0.5) ? 1.0 : -1.0;  // +1 turns left
  const double s_lo = -60.0;
  const double s_hi = std::min(cfg.road_length, 0.95 * std::numbers::pi * radius + s_lo);
  std::vector<Vec2> pts;
  for (double s = s_lo; s <= s_hi; s += 1.0) {
    const double phi = s / radius;
    pts.push_back({side * (-radius + radius * std::cos(phi)), radius * std::sin(phi)});
  }
  const Polyline reference(std::move(pts));
  return parallel_road(rng, reference, 0.0, reference.length(), -s_lo, false);
}

Layout intersection_layout(Rng & rng, const ScenarioConfig & cfg)
{
  Layout layout;
  const double cross_y = uniform(rng, 12.0, 40.0);
  const double half = 0.5 * kLaneWidth;
  const double far = 120.0;
  auto add = [&](std::vector<Vec2> pts, bool forward) {
    LaneInfo lane;
    lane.path = Polyline(std::move(pts));
    lane.forward = forward;
    layout.lanes.push_back(std::move(lane));
  };
  add({{0.0, -80.0}, {0.0, cfg.road_length}}, true);
  add({{-kLaneWidth, cfg.road_length}, {-kLaneWidth, -80.0}}, false);
  add({{-far, cross_y - half}, {far, cross_y - half}}, false);
  add({{far, cross_y + half}, {-far, cross_y + half}}, false);
  layout.ego_lane = 0;
  layout.ego_s0 = 80.0;

  const double right_edge = half;
  const double left_edge = -kLaneWidth - half;
  const double gap_lo = cross_y - kLaneWidth - 4.0;
  const double gap_hi = cross_y + kLaneWidth + 4.0;
  for (auto [y0, y1] : {std::pair{-80.0, gap_lo}, std::pair{gap_hi, cfg.road_length}}) {
    const Polyline ref({{0.0, y0}, {0.0, y1}});
    layout.drivable.push_back(strip_polygon(ref.points(), right_edge, right_edge + kParkingWidth));
    layout.drivable.push_back(strip_polygon(ref.points(), left_edge - kParkingWidth, left_edge));
    layout.parking.push_back({ref, right_edge, right_edge + kParkingWidth, 0.0, ref.length()});
    layout.parking.push_back({ref, left_edge - kParkingWidth, left_edge, 0.0, ref.length()});
    const double inset = 6.0;
    if (ref.length() > 2.0 * inset) {
      layout.roadside.push_back(
        {ref, right_edge + kParkingWidth + 0.8, right_edge + kParkingWidth + 8.0, inset, ref.length() - inset});
      layout.roadside.push_back(
        {ref, left_edge - kParkingWidth - 8.0, left_edge - kParkingWidth - 0.8, inset, ref.length() - inset});
    }
  }
  return layout;
}

struct Motion
{
  int lane = 0;
  double s0 = 0.0;
  double speed = 0.0;
  int speed_change_frame = -1;
  double speed_after = 0.0;
  int lane_change_start = -1;
  int lane_change_frames = 0;
  double lane_change_offset = 0.0;  // along the lane's right normal
};

double smoothstep(double t)
{
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

std::vector<Pose2D> integrate(const Layout & layout, const Motion & m, int frames, double dt)
{
  const Polyline & path = layout.lanes[static_cast<std::size_t>(m.lane)].path;
  std::vector<Pose2D> poses;
  poses.reserve(static_cast<std::size_t>(frames));
  double s = m.s0;
  for (int f = 0; f < frames; ++f) {
    const Pose2D base = path.pose_at(s);
    const double v = (m.speed_change_frame >= 0 && f >= m.speed_change_frame) ? m.speed_after : m.speed;
    double offset = 0.0;
    double heading = base.heading;
    if (m.lane_change_start >= 0) {
      const double t = static_cast<double>(f - m.lane_change_start) / m.lane_change_frames;
      offset = m.lane_change_offset * smoothstep(t);
      if (t > 0.0 && t < 1.0 && v > 0.0) {
        const double dtdf = 1.0 / m.lane_change_frames;
        const double doffset = m.lane_change_offset * 6.0 * t * (1.0 - t) * dtdf;
        heading -= std::atan2(doffset, v * dt);
      }
    }
    const Vec2 n = right_normal(base.heading);
    poses.emplace_back(base.x + offset * n.x, base.y + offset * n.y, heading);
    s += v * dt;
  }
  return poses;
}

OrientedBox inflated(const OrientedBox & b)
{
  return {b.pose, b.length + 2.0 * kClearance, b.width + 2.0 * kClearance};
}

bool collides(const VehicleTrack & cand, const std::vector<const VehicleTrack *> & placed,
              const std::vector<Obstacle> & obstacles, int frames)
{
  for (int f = 0; f < frames; ++f) {
    const OrientedBox box = inflated(cand.box_at(f));
    for (const VehicleTrack * other : placed) {
      if (boxes_overlap(box, inflated(other->box_at(f)))) {
        return true;
      }
    }
    for (const Obstacle & o : obstacles) {
      if (boxes_overlap(box, o.box)) {
        return true;
      }
    }
  }
  return false;
}

Footprint random_footprint(Rng & rng)
{
  return {uniform(rng, 4.0, 5.0), uniform(rng, 1.7, 2.0)};
}

void apply_transform(Scenario & sc, double theta, Vec2 t)
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  auto tf = [&](Vec2 p) { return Vec2{c * p.x - s * p.y + t.x, s * p.x + c * p.y + t.y}; };
  auto tf_pose = [&](const Pose2D & p) {
    const Vec2 q = tf(p.position());
    return Pose2D{q.x, q.y, p.heading + theta};
  };
  for (Lane & lane : sc.world_map.lanes) {
    for (Vec2 & p : lane.centerline) {
      p = tf(p);
    }
  }
  for (auto & poly : sc.world_map.drivable_polygons) {
    for (Vec2 & p : poly) {
      p = tf(p);
    }
  }
  for (Obstacle & o : sc.world_map.obstacles) {
    o.box.pose = tf_pose(o.box.pose);
  }
  for (Pose2D & p : sc.ego.poses) {
    p = tf_pose(p);
  }
  for (VehicleTrack & v : sc.vehicles) {
    for (Pose2D & p : v.poses) {
      p = tf_pose(p);
    }
  }
}

}  // namespace

double LidarScan::beam_angle(int i) const
{
  return origin.heading + 2.0 * std::numbers::pi * i / beam_count;
}

MotionClass classify_motion(const VehicleTrack & track)
{
  if (track.poses.size() < 2) {
    return MotionClass::kStatic;
  }
  const Pose2D & a = track.poses.front();
  const Pose2D & b = track.poses.back();
  return std::hypot(b.x - a.x, b.y - a.y) > kStaticDisplacementThreshold ? MotionClass::kDynamic
                                                                         : MotionClass::kStatic;
}

Scenario generate_scenario(std::uint64_t seed, const ScenarioConfig & cfg)
{
  if (cfg.duration_frames < 35) {
    throw std::invalid_argument("scenario duration must be at least 35 frames");
  }
  Rng rng(seed);
  Topology topo = cfg.topology;
  if (topo == Topology::kRandom) {
    topo = static_cast<Topology>(uniform_int(rng, 0, 2));
  }
  Layout layout;
  switch (topo) {
    case Topology::kStraight:
      layout = straight_layout(rng, cfg);
      break;
    case Topology::kCurve:
      layout = curve_layout(rng, cfg);
      break;
    default:
      layout = intersection_layout(rng, cfg);
      break;
  }

  Scenario sc;
  sc.seed = seed;
  sc.duration_frames = cfg.duration_frames;
  sc.frame_period = 0.1;
  for (const LaneInfo & l : layout.lanes) {
    sc.world_map.lanes.push_back({l.path.points(), kLaneWidth});
  }
  sc.world_map.drivable_polygons = layout.drivable;
  const int frames = cfg.duration_frames;
  const double dt = sc.frame_period;

  // roadside obstacles
  for (int i = 0; i < cfg.n_obstacles && !layout.roadside.empty(); ++i) {
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
      const auto & band = layout.roadside[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(layout.roadside.size()) - 1))];
      const double s = uniform(rng, band.s_lo, band.s_hi);
      const double len = uniform(rng, 2.0, 12.0);
      const double wid = uniform(rng, 0.5, 3.0);
      const double lo = band.offset_lo + 0.5 * wid;
      const double hi = band.offset_hi - 0.5 * wid;
      if (hi <= lo) {
        continue;
      }
      const double off = uniform(rng, lo, hi);
      const Pose2D base = band.path.pose_at(s);
      const Vec2 n = right_normal(base.heading);
      const OrientedBox box{{base.x + off * n.x, base.y + off * n.y, base.heading + uniform(rng, -0.1, 0.1)}, len, wid};
      bool clash = false;
      for (const Obstacle & o : sc.world_map.obstacles) {
        clash = clash || boxes_overlap(box, o.box);
      }
      if (!clash) {
        sc.world_map.obstacles.push_back({box});
        break;
      }
    }
  }

  // ego
  {
    Motion m;
    m.lane = layout.ego_lane;
    m.s0 = layout.ego_s0;
    m.speed = uniform(rng, cfg.ego_speed_min, cfg.ego_speed_max);
    sc.ego.id = 0;
    sc.ego.footprint = {4.6, 1.9};
    sc.ego.poses = integrate(layout, m, frames, dt);
    sc.ego.motion_class = classify_motion(sc.ego);
  }

  std::vector<const VehicleTrack *> placed{&sc.ego};
  sc.vehicles.reserve(static_cast<std::size_t>(cfg.n_static + cfg.n_dynamic + cfg.n_entering));
  int next_id = 1;
  auto place = [&](auto && draw) {
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
      VehicleTrack cand = draw();
      if (!collides(cand, placed, sc.world_map.obstacles, frames)) {
        cand.id = next_id++;
        cand.motion_class = classify_motion(cand);
        sc.vehicles.push_back(std::move(cand));
        placed.push_back(&sc.vehicles.back());
        return;
      }
    }
    throw GenerationError(seed, "could not place vehicle " + std::to_string(next_id));
  };

  const int n_lanes = static_cast<int>(layout.lanes.size());
  const double ego_speed = sc.ego.poses.size() > 1
    ? std::hypot(sc.ego.poses[1].x - sc.ego.poses[0].x, sc.ego.poses[1].y - sc.ego.poses[0].y) / dt
    : 0.0;

  for (int i = 0; i < cfg.n_dynamic; ++i) {
    place([&] {
      Motion m;
      m.lane = uniform_int(rng, 0, n_lanes - 1);
      const LaneInfo & lane = layout.lanes[static_cast<std::size_t>(m.lane)];
      // start within roughly [-15, 65] m of the ego start along the road
      const double along = uniform(rng, -15.0, 65.0);
      if (lane.forward && m.lane == layout.ego_lane) {
        m.s0 = layout.ego_s0 + along;
      } else {
        // project the desired position onto the lane
        const Pose2D ego0 = layout.lanes[static_cast<std::size_t>(layout.ego_lane)].path.pose_at(layout.ego_s0 + along);
        double best = std::numeric_limits<double>::infinity();
        for (double s = 0.0; s <= lane.path.length(); s += 1.0) {
          const Pose2D p = lane.path.pose_at(s);
          const double d = std::hypot(p.x - ego0.x, p.y - ego0.y);
          if (d < best) {
            best = d;
            m.s0 = s;
          }
        }
        if (best > 20.0) {
          // crossing lanes: pick any point near the visible area
          m.s0 = uniform(rng, 0.0, lane.path.length());
        }
      }
      m.speed = uniform(rng, cfg.speed_min, cfg.speed_max);
      if (chance(rng, cfg.speed_change_prob)) {
        m.speed_change_frame = uniform_int(rng, 5, frames - 5);
        m.speed_after = uniform(rng, cfg.speed_min, cfg.speed_max);
      }
      if (lane.allows_lane_change && chance(rng, cfg.lane_change_prob)) {
        const bool to_right = chance(rng, 0.5);
        const int target = to_right ? lane.neighbour_right : lane.neighbour_left;
        if (target >= 0) {
          m.lane_change_frames = uniform_int(rng, 20, 30);
          m.lane_change_start = uniform_int(rng, 0, std::max(0, frames - m.lane_change_frames));
          m.lane_change_offset = to_right ? kLaneWidth : -kLaneWidth;
        }
      }
      VehicleTrack t;
      t.footprint = random_footprint(rng);
      t.poses = integrate(layout, m, frames, dt);
      return t;
    });
  }

  for (int i = 0; i < cfg.n_static; ++i) {
    place([&] {
      VehicleTrack t;
      t.footprint = random_footprint(rng);
      Pose2D pose;
      if (chance(rng, 0.15) || layout.parking.empty()) {
        const int li = uniform_int(rng, 0, n_lanes - 1);
        const LaneInfo & lane = layout.lanes[static_cast<std::size_t>(li)];
        pose = lane.path.pose_at(uniform(rng, 0.0, lane.path.length()));
      } else {
        const auto & band = layout.parking[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(layout.parking.size()) - 1))];
        const double s = uniform(rng, band.s_lo, band.s_hi);
        const Pose2D base = band.path.pose_at(s);
        const double off = 0.5 * (band.offset_lo + band.offset_hi) + uniform(rng, -0.15, 0.15);
        const Vec2 n = right_normal(base.heading);
        const double flip = chance(rng, 0.5) ? 0.0 : std::numbers::pi;
        pose = Pose2D{base.x + off * n.x, base.y + off * n.y, base.heading + flip + uniform(rng, -0.05, 0.05)};
      }
      t.poses.assign(static_cast<std::size_t>(frames), pose);
      return t;
    });
  }

  for (int i = 0; i < cfg.n_entering; ++i) {
    place([&] {
      Motion m;
      std::vector<int> fwd, bwd;
      for (int k = 0; k < n_lanes; ++k) {
        (layout.lanes[static_cast<std::size_t>(k)].forward ? fwd : bwd).push_back(k);
      }
      const bool from_behind = bwd.empty() || chance(rng, 0.5);
      const Polyline & ego_path = layout.lanes[static_cast<std::size_t>(layout.ego_lane)].path;
      if (from_behind) {
        m.lane = fwd[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(fwd.size()) - 1))];
        m.speed = ego_speed + uniform(rng, 4.0, 7.0);
        const Pose2D target = ego_path.pose_at(layout.ego_s0 - uniform(rng, 18.0, 28.0));
        const LaneInfo & lane = layout.lanes[static_cast<std::size_t>(m.lane)];
        double best = std::numeric_limits<double>::infinity();
        for (double s = 0.0; s <= lane.path.length(); s += 0.5) {
          const Pose2D p = lane.path.pose_at(s);
          const double dd = std::hypot(p.x - target.x, p.y - target.y);
          if (dd < best) {
            best = dd;
            m.s0 = s;
          }
        }
      } else {
        m.lane = bwd[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(bwd.size()) - 1))];
        m.speed = uniform(rng, cfg.speed_min, cfg.speed_max);
        const Pose2D target = ego_path.pose_at(layout.ego_s0 + uniform(rng, 62.0, 80.0));
        const LaneInfo & lane = layout.lanes[static_cast<std::size_t>(m.lane)];
        double best = std::numeric_limits<double>::infinity();
        for (double s = 0.0; s <= lane.path.length(); s += 0.5) {
          const Pose2D p = lane.path.pose_at(s);
          const double dd = std::hypot(p.x - target.x, p.y - target.y);
          if (dd < best) {
            best = dd;
            m.s0 = s;
          }
        }
      }
      VehicleTrack t;
      t.footprint = random_footprint(rng);
      t.poses = integrate(layout, m, frames, dt);
      return t;
    });
  }

  if (cfg.random_world_frame) {
    const double theta = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const Vec2 t{uniform(rng, -200.0, 200.0), uniform(rng, -200.0, 200.0)};
    apply_transform(sc, theta, t);
  }
  return sc;
}

LidarScan raycast(const Scenario & scenario, int frame, const LidarConfig & lidar)
{
  if (frame < 0 || frame >= scenario.duration_frames) {
    throw std::invalid_argument("raycast: frame " + std::to_string(frame) + " outside scenario");
  }
  LidarScan scan;
  scan.origin = scenario.ego.poses[static_cast<std::size_t>(frame)];
  scan.beam_count = lidar.beams;
  scan.max_range = lidar.max_range;
  scan.ranges.assign(static_cast<std::size_t>(lidar.beams), lidar.max_range + kNoReturnMargin);

  std::vector<OrientedBox> boxes;
  const Vec2 o = scan.origin.position();
  auto consider = [&](const OrientedBox & b) {
    const double reach = lidar.max_range + 0.5 * std::hypot(b.length, b.width);
    if (std::hypot(b.pose.x - o.x, b.pose.y - o.y) <= reach) {
      boxes.push_back(b);
    }
  };
  for (const VehicleTrack & v : scenario.vehicles) {
    consider(v.box_at(frame));
  }
  for (const Obstacle & ob : scenario.world_map.obstacles) {
    consider(ob.box);
  }

  std::mt19937_64 noise_rng(lidar.noise_seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(frame));
  std::normal_distribution<double> noise(0.0, lidar.range_noise_sigma > 0.0 ? lidar.range_noise_sigma : 1.0);

  for (int i = 0; i < lidar.beams; ++i) {
    const double a = scan.beam_angle(i);
    const Vec2 dir{std::cos(a), std::sin(a)};
    double best = std::numeric_limits<double>::infinity();
    for (const OrientedBox & b : boxes) {
      if (auto t = ray_box_intersection(o, dir, b); t && *t < best) {
        best = *t;
      }
    }
    if (best <= lidar.max_range) {
      if (lidar.range_noise_sigma > 0.0) {
        best = std::clamp(best + noise(noise_rng), 1e-3, lidar.max_range);
      }
      scan.ranges[static_cast<std::size_t>(i)] = best;
    }
  }
  return scan;
}

VehicleGrid gt_vehicle_grid(const Scenario & scenario, int frame, const GridSpec & spec,
                            bool include_ego, double margin)
{
  if (frame < 0 || frame >= scenario.duration_frames) {
    throw std::invalid_argument("gt_vehicle_grid: frame outside scenario");
  }
  VehicleGrid grid(spec);
  auto stamp = [&](const VehicleTrack & v) {
    for_each_cell_in_box(spec, v.box_at(frame), margin,
                         [&](CellIndex, std::size_t i) { grid.occupancy[i] = 1.0F; });
  };
  for (const VehicleTrack & v : scenario.vehicles) {
    stamp(v);
  }
  if (include_ego) {
    stamp(scenario.ego);
  }
  return grid;
}

const VehicleTrack * find_vehicle(const Scenario & scenario, int id)
{
  if (scenario.ego.id == id) {
    return &scenario.ego;
  }
  for (const VehicleTrack & v : scenario.vehicles) {
    if (v.id == id) {
      return &v;
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// JSON

std::string to_string(Topology t)
{
  switch (t) {
    case Topology::kStraight:
      return "straight";
    case Topology::kCurve:
      return "curve";
    case Topology::kIntersection:
      return "intersection";
    default:
      return "random";
  }
}

Topology topology_from_string(const std::string & s)
{
  if (s == "straight") {
    return Topology::kStraight;
  }
  if (s == "curve") {
    return Topology::kCurve;
  }
  if (s == "intersection") {
    return Topology::kIntersection;
  }
  if (s == "random") {
    return Topology::kRandom;
  }
  throw std::invalid_argument("unknown topology '" + s + "'");
}

namespace
{

nlohmann::json points_json(const std::vector<Vec2> & pts)
{
  nlohmann::json a = nlohmann::json::array();
  for (const Vec2 & p : pts) {
    a.push_back({p.x, p.y});
  }
  return a;
}

std::vector<Vec2> points_from(const nlohmann::json & a)
{
  std::vector<Vec2> pts;
  for (const auto & p : a) {
    pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return pts;
}

nlohmann::json track_json(const VehicleTrack & t)
{
  nlohmann::json poses = nlohmann::json::array();
  for (const Pose2D & p : t.poses) {
    poses.push_back({p.x, p.y, p.heading});
  }
  return {{"id", t.id},
          {"length", t.footprint.length},
          {"width", t.footprint.width},
          {"motion_class", t.motion_class == MotionClass::kDynamic ? "dynamic" : "static"},
          {"poses", poses}};
}

VehicleTrack track_from(const nlohmann::json & j)
{
  VehicleTrack t;
  t.id = j.at("id").get<int>();
  t.footprint = {j.at("length").get<double>(), j.at("width").get<double>()};
  t.motion_class = j.at("motion_class").get<std::string>() == "dynamic" ? MotionClass::kDynamic
                                                                        : MotionClass::kStatic;
  for (const auto & p : j.at("poses")) {
    Pose2D pose;
    pose.x = p.at(0).get<double>();
    pose.y = p.at(1).get<double>();
    pose.heading = p.at(2).get<double>();
    t.poses.push_back(pose);
  }
  return t;
}

}  // namespace

nlohmann::json scenario_to_json(const Scenario & sc)
{
  nlohmann::json lanes = nlohmann::json::array();
  for (const Lane & l : sc.world_map.lanes) {
    lanes.push_back({{"width", l.width}, {"centerline", points_json(l.centerline)}});
  }
  nlohmann::json polys = nlohmann::json::array();
  for (const auto & p : sc.world_map.drivable_polygons) {
    polys.push_back(points_json(p));
  }
  nlohmann::json obstacles = nlohmann::json::array();
  for (const Obstacle & o : sc.world_map.obstacles) {
    obstacles.push_back({{"x", o.box.pose.x},
                         {"y", o.box.pose.y},
                         {"heading", o.box.pose.heading},
                         {"length", o.box.length},
                         {"width", o.box.width}});
  }
  nlohmann::json vehicles = nlohmann::json::array();
  for (const VehicleTrack & v : sc.vehicles) {
    vehicles.push_back(track_json(v));
  }
  return {{"format", "gridcast-scenario"},
          {"version", 1},
          {"seed", sc.seed},
          {"duration_frames", sc.duration_frames},
          {"frame_period", sc.frame_period},
          {"world_map", {{"lanes", lanes}, {"drivable_polygons", polys}, {"obstacles", obstacles}}},
          {"ego", track_json(sc.ego)},
          {"vehicles", vehicles}};
}

Scenario scenario_from_json(const nlohmann::json & j)
{
  Scenario sc;
  sc.seed = j.at("seed").get<std::uint64_t>();
  sc.duration_frames = j.at("duration_frames").get<int>();
  sc.frame_period = j.at("frame_period").get<double>();
  const auto & wm = j.at("world_map");
  for (const auto & l : wm.at("lanes")) {
    sc.world_map.lanes.push_back({points_from(l.at("centerline")), l.at("width").get<double>()});
  }
  for (const auto & p : wm.at("drivable_polygons")) {
    sc.world_map.drivable_polygons.push_back(points_from(p));
  }
  for (const auto & o : wm.at("obstacles")) {
    Obstacle ob;
    ob.box.pose.x = o.at("x").get<double>();
    ob.box.pose.y = o.at("y").get<double>();
    ob.box.pose.heading = o.at("heading").get<double>();
    ob.box.length = o.at("length").get<double>();
    ob.box.width = o.at("width").get<double>();
    sc.world_map.obstacles.push_back(ob);
  }
  sc.ego = track_from(j.at("ego"));
  for (const auto & v : j.at("vehicles")) {
    sc.vehicles.push_back(track_from(v));
  }
  return sc;
}

nlohmann::json scenario_config_to_json(const ScenarioConfig & c)
{
  return {{"n_static", c.n_static},
          {"n_dynamic", c.n_dynamic},
          {"n_obstacles", c.n_obstacles},
          {"topology", to_string(c.topology)},
          {"speed_min", c.speed_min},
          {"speed_max", c.speed_max},
          {"ego_speed_min", c.ego_speed_min},
          {"ego_speed_max", c.ego_speed_max},
          {"road_length", c.road_length},
          {"duration_frames", c.duration_frames},
          {"lane_change_prob", c.lane_change_prob},
          {"speed_change_prob", c.speed_change_prob},
          {"n_entering", c.n_entering},
          {"random_world_frame", c.random_world_frame},
          {"max_retries", c.max_retries}};
}

ScenarioConfig scenario_config_from_json(const nlohmann::json & j)
{
  ScenarioConfig c;
  c.n_static = j.value("n_static", c.n_static);
  c.n_dynamic = j.value("n_dynamic", c.n_dynamic);
  c.n_obstacles = j.value("n_obstacles", c.n_obstacles);
  c.topology = topology_from_string(j.value("topology", to_string(c.topology)));
  c.speed_min = j.value("speed_min", c.speed_min);
  c.speed_max = j.value("speed_max", c.speed_max);
  c.ego_speed_min = j.value("ego_speed_min", c.ego_speed_min);
  c.ego_speed_max = j.value("ego_speed_max", c.ego_speed_max);
  c.road_length = j.value("road_length", c.road_length);
  c.duration_frames = j.value("duration_frames", c.duration_frames);
  c.lane_change_prob = j.value("lane_change_prob", c.lane_change_prob);
  c.speed_change_prob = j.value("speed_change_prob", c.speed_change_prob);
  c.n_entering = j.value("n_entering", c.n_entering);
  c.random_world_frame = j.value("random_world_frame", c.random_world_frame);
  c.max_retries = j.value("max_retries", c.max_retries);
  return c;
}

}  // namespace gridcast
