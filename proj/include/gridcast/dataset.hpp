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

// Synthetic sequence generation and the on-disk dataset layout.
//
//   <root>/manifest.json
//   <root>/<split>/<name>/scenario.json
//                        dogm.grd             [N, 4, S, S] f32, channels free, static, dynamic, unknown
//                        semantics.grd        [N, 1, S, S] u8
//                        semantics_noisy.grd  [N, 1, S, S] u8
//                        map.grd              [1, 3, S, S] f32
//                        targets.grd          [P + 1, 1, S, S] u8
//
// The grid is anchored at the ego pose of the present frame (the last input).
// The filter runs at `filter_upsample` times the model resolution and is
// area-averaged down; semantics are associated at the fine resolution and
// any-pooled.

#ifndef GRIDCAST__DATASET_HPP_
#define GRIDCAST__DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcast/occupancy_filter.hpp"
#include "gridcast/predictor.hpp"
#include "gridcast/scenario.hpp"
#include "gridcast/semantic_fusion.hpp"

namespace gridcast
{

struct DatasetConfig
{
  int n_train = 200;
  int n_val = 50;
  int grid_side = 64;
  double extent = 60.0;
  int filter_upsample = 3;
  int input_frames = 10;
  int future_steps = 5;
  int frames_per_step = 5;
  bool ego_in_semantics = true;
  bool ego_in_targets = true;
  std::uint64_t val_seed_offset = 1000000;
  ScenarioConfig scenario;
  FilterParams filter;
  LidarConfig lidar;
  NoiseParams noise = NoiseParams::calibrated();

  double resolution() const { return extent / grid_side; }
  int present_frame() const { return input_frames - 1; }
  int frames_needed() const { return input_frames + future_steps * frames_per_step; }
  /// Scenario frames of the P + 1 targets, starting at the present.
  std::vector<int> target_frames() const;
  void validate() const;
};

nlohmann::json dataset_config_to_json(const DatasetConfig & c);
/// Missing keys keep their defaults; unknown keys are rejected.
DatasetConfig dataset_config_from_json(const nlohmann::json & j);

nlohmann::json filter_params_to_json(const FilterParams & p);
FilterParams filter_params_from_json(const nlohmann::json & j);

/// 64-bit FNV-1a of a JSON document's compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json & j);

/// Everything derived from one scenario, on the model grid.
struct SequenceData
{
  Scenario scenario;
  GridSpec spec;
  std::vector<DogmFrame> dogm;                // input frames
  std::vector<SemanticGrid> semantics;        // input frames
  std::vector<SemanticGrid> semantics_noisy;  // input frames
  RasterMap map;
  std::vector<VehicleGrid> targets;  // present + future steps
  std::set<int> perceived;
};

/// Throws GenerationError when the scenario cannot be generated.
SequenceData generate_sequence(std::uint64_t seed, const DatasetConfig & config);

/// Clean model-grid semantic labels (ego not stamped) of the last input frame
/// of `count` scenarios starting at `seed`; failed scenarios are skipped.
std::vector<VehicleGrid> clean_semantics(std::uint64_t seed, int count, const DatasetConfig & config);

/// Marks the ego footprint as a vehicle in a semantic grid.
void stamp_ego(SemanticGrid & grid, const Scenario & scenario, int frame);

struct SequenceEntry
{
  std::string name;
  std::uint64_t seed = 0;
  std::string dir;  // relative to the dataset root
  std::vector<int> perceived;
};

struct Manifest
{
  int version = 1;
  DatasetConfig config;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<SequenceEntry> train;
  std::vector<SequenceEntry> val;
  std::vector<std::uint64_t> skipped;
};

inline constexpr const char * kManifestFile = "manifest.json";

nlohmann::json manifest_to_json(const Manifest & m);
Manifest manifest_from_json(const nlohmann::json & j);

struct GenerateOptions
{
  int workers = 1;
  std::function<void(const std::string &)> log;
};

/// Writes a full dataset under `root` and returns its manifest. Scenarios that
/// fail to generate are skipped and listed. Output bytes depend only on
/// (seed, config), not on the worker count.
Manifest generate_dataset(const std::filesystem::path & root, std::uint64_t seed, const DatasetConfig & config,
                          const GenerateOptions & options = {});

void write_sequence(const std::filesystem::path & dir, const SequenceData & data, const DatasetConfig & config);

/// Reads the manifest and checks that every referenced file exists, parses and
/// has the expected shape. Throws FormatError naming the first bad file.
Manifest load_manifest(const std::filesystem::path & root);

struct LoadedSequence
{
  Scenario scenario;
  GridSpec spec;
  std::vector<DogmFrame> dogm;
  RasterMap map;
  std::vector<VehicleGrid> targets;
  std::set<int> perceived;
  SequenceSample sample;  // model tensors
};

struct LoadOptions
{
  bool noisy_semantics = false;
};

LoadedSequence load_sequence(const std::filesystem::path & root, const Manifest & manifest,
                             const SequenceEntry & entry, const LoadOptions & options = {});

/// Model tensors from generated data: per frame (unknown, dynamic, static, semantic).
SequenceSample make_sample(const std::vector<DogmFrame> & dogm, const std::vector<SemanticGrid> & semantics,
                           const RasterMap & map, const std::vector<VehicleGrid> & targets);

/// Throws std::invalid_argument naming both geometries when they differ.
void check_geometry(const ModelConfig & model, const DatasetConfig & data);

}  // namespace gridcast

#endif  // GRIDCAST__DATASET_HPP_
