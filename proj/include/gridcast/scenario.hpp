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

#ifndef GRIDCAST__SCENARIO_HPP_
#define GRIDCAST__SCENARIO_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcast/geometry.hpp"
#include "gridcast/grid.hpp"

namespace gridcast
{

struct Lane
{
  std::vector<Vec2> centerline;  // travel direction = point order
  double width = 3.5;
};

/// Roadside structure seen by the lidar but never labelled as a vehicle.
struct Obstacle
{
  OrientedBox box;
};

struct WorldMap
{
  std::vector<Lane> lanes;
  std::vector<std::vector<Vec2>> drivable_polygons;
  std::vector<Obstacle> obstacles;
};

struct Footprint
{
  double length = 4.5;
  double width = 1.8;
};

enum class MotionClass { kStatic, kDynamic };

struct VehicleTrack
{
  int id = 0;
  Footprint footprint;
  std::vector<Pose2D> poses;  // one per frame
  MotionClass motion_class = MotionClass::kStatic;

  OrientedBox box_at(int frame) const
  {
    return {poses.at(static_cast<std::size_t>(frame)), footprint.length, footprint.width};
  }
};

struct Scenario
{
  std::uint64_t seed = 0;
  WorldMap world_map;
  VehicleTrack ego;
  std::vector<VehicleTrack> vehicles;
  int duration_frames = 35;
  double frame_period = 0.1;
};

enum class Topology { kStraight, kCurve, kIntersection, kRandom };

struct ScenarioConfig
{
  int n_static = 4;
  int n_dynamic = 4;
  int n_obstacles = 6;
  Topology topology = Topology::kRandom;
  double speed_min = 3.0;   // m/s
  double speed_max = 10.0;  // m/s
  double ego_speed_min = 3.0;
  double ego_speed_max = 8.0;
  double road_length = 200.0;  // meters of lane ahead of the ego start
  int duration_frames = 35;
  double lane_change_prob = 0.25;
  double speed_change_prob = 0.3;
  /// Extra dynamic vehicles that start outside the sensed area and drive in.
  int n_entering = 0;
  /// Rotate/translate the whole world by a random rigid transform.
  bool random_world_frame = true;
  int max_retries = 200;
};

class GenerationError : public std::runtime_error
{
public:
  GenerationError(std::uint64_t seed, const std::string & what)
  : std::runtime_error("scenario generation failed for seed " + std::to_string(seed) + ": " + what),
    seed_(seed)
  {
  }
  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
};

/// Deterministic in (seed, config). Throws GenerationError when vehicles
/// cannot be placed without overlap after bounded retries.
Scenario generate_scenario(std::uint64_t seed, const ScenarioConfig & config);

inline constexpr double kNoReturnMargin = 0.01;
inline constexpr double kStaticDisplacementThreshold = 0.5;

struct LidarScan
{
  Pose2D origin;
  int beam_count = 0;
  double max_range = 0.0;
  std::vector<double> ranges;  // > max_range means no return

  double beam_angle(int i) const;
  bool is_return(int i) const { return ranges[static_cast<std::size_t>(i)] <= max_range; }
};

struct LidarConfig
{
  int beams = 720;
  double max_range = 50.0;
  double range_noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

/// Beams uniformly spaced over 2 pi starting at the ego heading. Hits vehicle
/// footprints (except the ego) and roadside obstacles.
LidarScan raycast(const Scenario & scenario, int frame, const LidarConfig & lidar = {});

/// Cell = 1 iff its centre lies in some vehicle footprint grown by `margin`.
VehicleGrid gt_vehicle_grid(const Scenario & scenario, int frame, const GridSpec & spec,
                            bool include_ego, double margin = 0.0);

/// Dynamic iff first-to-last displacement exceeds 0.5 m.
MotionClass classify_motion(const VehicleTrack & track);

const VehicleTrack * find_vehicle(const Scenario & scenario, int id);

nlohmann::json scenario_to_json(const Scenario & scenario);
Scenario scenario_from_json(const nlohmann::json & j);
nlohmann::json scenario_config_to_json(const ScenarioConfig & c);
ScenarioConfig scenario_config_from_json(const nlohmann::json & j);

std::string to_string(Topology t);
Topology topology_from_string(const std::string & s);

}  // namespace gridcast

#endif  // GRIDCAST__SCENARIO_HPP_
