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

#include "gridcast/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gridcast/geometry.hpp"
#include "gridcast/grd1.hpp"
#include "gridcast/parallel.hpp"

namespace gridcast
{

namespace fs = std::filesystem;

constexpr double kFrameRate = 10.0;  // Hz

// ---------------------------------------------------------------------------
// config

std::vector<int> DatasetConfig::target_frames() const
{
  std::vector<int> frames;
  for (int k = 0; k <= future_steps; ++k) {
    frames.push_back(present_frame() + k * frames_per_step);
  }
  return frames;
}

void DatasetConfig::validate() const
{
  auto fail = [](const std::string & m) { throw std::invalid_argument("dataset config: " + m); };
  if (n_train < 0 || n_val < 0) fail("split sizes must be non-negative");
  if (grid_side < 8) fail("grid_side must be >= 8");
  if (!(extent > 0.0)) fail("extent must be positive");
  if (filter_upsample < 1) fail("filter_upsample must be >= 1");
  if (input_frames < 1 || future_steps < 1 || frames_per_step < 1) fail("frame counts must be >= 1");
  if (scenario.duration_frames < frames_needed()) {
    fail("scenarios last " + std::to_string(scenario.duration_frames) + " frames, sequences need " +
         std::to_string(frames_needed()));
  }
  filter.validate();
}

nlohmann::json filter_params_to_json(const FilterParams & p)
{
  return {{"p_hit", p.p_hit},
          {"p_miss", p.p_miss},
          {"decay", p.decay},
          {"dynamic_gain", p.dynamic_gain},
          {"static_gain", p.static_gain}};
}

namespace
{

void reject_unknown(const nlohmann::json & j, const nlohmann::json & defaults, const std::string & what)
{
  if (!j.is_object()) {
    throw std::invalid_argument(what + ": expected an object");
  }
  for (const auto & [key, _] : j.items()) {
    if (!defaults.contains(key)) {
      throw std::invalid_argument(what + ": unknown key '" + key + "'");
    }
  }
}

nlohmann::json lidar_to_json(const LidarConfig & l)
{
  return {{"beams", l.beams},
          {"max_range", l.max_range},
          {"range_noise_sigma", l.range_noise_sigma},
          {"noise_seed", l.noise_seed}};
}

LidarConfig lidar_from_json(const nlohmann::json & j)
{
  LidarConfig l;
  reject_unknown(j, lidar_to_json(l), "lidar config");
  l.beams = j.value("beams", l.beams);
  l.max_range = j.value("max_range", l.max_range);
  l.range_noise_sigma = j.value("range_noise_sigma", l.range_noise_sigma);
  l.noise_seed = j.value("noise_seed", l.noise_seed);
  return l;
}

}  // namespace

FilterParams filter_params_from_json(const nlohmann::json & j)
{
  FilterParams p;
  reject_unknown(j, filter_params_to_json(p), "filter config");
  p.p_hit = j.value("p_hit", p.p_hit);
  p.p_miss = j.value("p_miss", p.p_miss);
  p.decay = j.value("decay", p.decay);
  p.dynamic_gain = j.value("dynamic_gain", p.dynamic_gain);
  p.static_gain = j.value("static_gain", p.static_gain);
  p.validate();
  return p;
}

nlohmann::json dataset_config_to_json(const DatasetConfig & c)
{
  return {{"n_train", c.n_train},
          {"n_val", c.n_val},
          {"grid_side", c.grid_side},
          {"extent", c.extent},
          {"filter_upsample", c.filter_upsample},
          {"input_frames", c.input_frames},
          {"future_steps", c.future_steps},
          {"frames_per_step", c.frames_per_step},
          {"ego_in_semantics", c.ego_in_semantics},
          {"ego_in_targets", c.ego_in_targets},
          {"val_seed_offset", c.val_seed_offset},
          {"scenario", scenario_config_to_json(c.scenario)},
          {"filter", filter_params_to_json(c.filter)},
          {"lidar", lidar_to_json(c.lidar)},
          {"noise", noise_params_to_json(c.noise)}};
}

DatasetConfig dataset_config_from_json(const nlohmann::json & j)
{
  DatasetConfig c;
  reject_unknown(j, dataset_config_to_json(c), "dataset config");
  c.n_train = j.value("n_train", c.n_train);
  c.n_val = j.value("n_val", c.n_val);
  c.grid_side = j.value("grid_side", c.grid_side);
  c.extent = j.value("extent", c.extent);
  c.filter_upsample = j.value("filter_upsample", c.filter_upsample);
  c.input_frames = j.value("input_frames", c.input_frames);
  c.future_steps = j.value("future_steps", c.future_steps);
  c.frames_per_step = j.value("frames_per_step", c.frames_per_step);
  c.ego_in_semantics = j.value("ego_in_semantics", c.ego_in_semantics);
  c.ego_in_targets = j.value("ego_in_targets", c.ego_in_targets);
  c.val_seed_offset = j.value("val_seed_offset", c.val_seed_offset);
  if (j.contains("scenario")) c.scenario = scenario_config_from_json(j.at("scenario"));
  if (j.contains("filter")) c.filter = filter_params_from_json(j.at("filter"));
  if (j.contains("lidar")) c.lidar = lidar_from_json(j.at("lidar"));
  if (j.contains("noise")) c.noise = noise_params_from_json(j.at("noise"));
  c.validate();
  return c;
}

std::string config_hash(const nlohmann::json & j)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// generation

void stamp_ego(SemanticGrid & grid, const Scenario & scenario, int frame)
{
  for_each_cell_in_box(grid.spec, scenario.ego.box_at(frame), 0.0,
                       [&](CellIndex, std::size_t i) { grid.labels[i] = 1; });
}

namespace
{

DogmFrame downsample(const DogmFrame & fine, const GridSpec & coarse)
{
  DogmFrame out(coarse);
  const int from = fine.spec.cells_per_side();
  const int to = coarse.cells_per_side();
  for (int ch = 0; ch < 4; ++ch) {
    out.planes[static_cast<std::size_t>(ch)] = resize_grid(std::span<const float>(fine.planes[static_cast<std::size_t>(ch)]), from, to);
  }
  return out;
}

VehicleGrid labels_as_grid(const SemanticGrid & s)
{
  VehicleGrid g(s.spec);
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    g.occupancy[i] = s.labels[i] ? 1.0F : 0.0F;
  }
  return g;
}

SemanticGrid grid_as_labels(const VehicleGrid & g)
{
  SemanticGrid s(g.spec);
  for (std::size_t i = 0; i < g.occupancy.size(); ++i) {
    s.labels[i] = g.occupancy[i] > 0.5F ? 1 : 0;
  }
  return s;
}

}  // namespace

SequenceData generate_sequence(std::uint64_t seed, const DatasetConfig & config)
{
  config.validate();
  SequenceData out;
  out.scenario = generate_scenario(seed, config.scenario);
  const Scenario & sc = out.scenario;
  const int present = config.present_frame();
  const Pose2D ego = sc.ego.poses.at(static_cast<std::size_t>(present));
  out.spec = anchor_from_ego(ego, config.extent, config.resolution());
  const GridSpec fine = out.spec.with_resolution(config.resolution() / config.filter_upsample);

  SequenceOptions opts;
  opts.lidar = config.lidar;
  opts.lidar.noise_seed = config.lidar.noise_seed ^ seed;
  const auto fine_frames = run_sequence(sc, fine, config.filter, 0, config.input_frames, opts);
  out.perceived = perceived_vehicles(fine_frames, sc, fine, 0);

  const double margin = footprint_margin(fine);
  for (int f = 0; f < config.input_frames; ++f) {
    const DogmFrame & ff = fine_frames[static_cast<std::size_t>(f)];
    out.dogm.push_back(downsample(ff, out.spec));
    const VehicleGrid source = gt_vehicle_grid(sc, f, fine, false, margin);
    SemanticGrid labels = pool_labels(associate_labels(ff, source), out.spec);
    std::seed_seq noise_seed{seed, static_cast<std::uint64_t>(f), std::uint64_t{0x5E3A}};
    std::mt19937_64 noise_rng(noise_seed);
    SemanticGrid noisy = grid_as_labels(corrupt_semantics(labels_as_grid(labels), noise_rng(), config.noise));
    if (config.ego_in_semantics) {
      stamp_ego(labels, sc, f);
      stamp_ego(noisy, sc, f);
    }
    out.semantics.push_back(std::move(labels));
    out.semantics_noisy.push_back(std::move(noisy));
  }
  out.map = rasterize_map(sc.world_map, out.spec);
  const auto frames = config.target_frames();
  TargetOptions topts;
  topts.include_ego = config.ego_in_targets;
  out.targets = build_targets(sc, out.spec, out.perceived, frames, topts);
  return out;
}

std::vector<VehicleGrid> clean_semantics(std::uint64_t seed, int count, const DatasetConfig & config)
{
  DatasetConfig c = config;
  c.ego_in_semantics = false;
  c.noise = NoiseParams{};
  std::vector<VehicleGrid> out;
  for (int i = 0; i < count; ++i) {
    try {
      const SequenceData d = generate_sequence(seed + static_cast<std::uint64_t>(i), c);
      out.push_back(labels_as_grid(d.semantics.back()));
    } catch (const GenerationError &) {
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// storage

namespace
{

std::array<std::uint32_t, 4> dims(int t, int c, int side)
{
  return {static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(side),
          static_cast<std::uint32_t>(side)};
}

GrdTensor pack_labels(const std::vector<SemanticGrid> & frames, int side)
{
  std::vector<std::uint8_t> values;
  for (const auto & f : frames) {
    values.insert(values.end(), f.labels.begin(), f.labels.end());
  }
  return GrdTensor::make_u8(dims(static_cast<int>(frames.size()), 1, side), std::move(values));
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw FormatError("cannot write " + path.string());
  }
  os << text;
  if (!os) {
    throw FormatError("write failed for " + path.string());
  }
}

nlohmann::json read_json(const fs::path & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw FormatError("cannot open " + path.string());
  }
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception & e) {
    throw FormatError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

struct FileShape
{
  const char * name;
  GrdType dtype;
  std::array<std::uint32_t, 4> dims;
};

std::vector<FileShape> expected_files(const DatasetConfig & c)
{
  const int S = c.grid_side;
  return {{"dogm.grd", GrdType::kFloat32, dims(c.input_frames, 4, S)},
          {"semantics.grd", GrdType::kUInt8, dims(c.input_frames, 1, S)},
          {"semantics_noisy.grd", GrdType::kUInt8, dims(c.input_frames, 1, S)},
          {"map.grd", GrdType::kFloat32, dims(1, 3, S)},
          {"targets.grd", GrdType::kUInt8, dims(c.future_steps + 1, 1, S)}};
}

GrdTensor load_checked(const fs::path & path, const FileShape & want)
{
  GrdTensor t = load_grd1(path);
  if (t.dtype != want.dtype || t.dims != want.dims) {
    throw FormatError(path.string() + ": unexpected tensor shape or type");
  }
  return t;
}

}  // namespace

void write_sequence(const fs::path & dir, const SequenceData & data, const DatasetConfig & config)
{
  fs::create_directories(dir);
  const int S = config.grid_side;
  write_text(dir / "scenario.json", scenario_to_json(data.scenario).dump(1) + "\n");

  std::vector<float> dogm;
  for (const auto & f : data.dogm) {
    for (const auto & plane : f.planes) {
      dogm.insert(dogm.end(), plane.begin(), plane.end());
    }
  }
  save_grd1(dir / "dogm.grd", GrdTensor::make_f32(dims(static_cast<int>(data.dogm.size()), 4, S), std::move(dogm)));
  save_grd1(dir / "semantics.grd", pack_labels(data.semantics, S));
  save_grd1(dir / "semantics_noisy.grd", pack_labels(data.semantics_noisy, S));

  std::vector<float> map;
  for (const auto & ch : data.map.channels) {
    map.insert(map.end(), ch.begin(), ch.end());
  }
  save_grd1(dir / "map.grd", GrdTensor::make_f32(dims(1, 3, S), std::move(map)));

  std::vector<std::uint8_t> targets;
  for (const auto & t : data.targets) {
    for (float v : t.occupancy) {
      targets.push_back(v > 0.5F ? 1 : 0);
    }
  }
  save_grd1(dir / "targets.grd",
            GrdTensor::make_u8(dims(static_cast<int>(data.targets.size()), 1, S), std::move(targets)));
}

nlohmann::json manifest_to_json(const Manifest & m)
{
  auto entries = [](const std::vector<SequenceEntry> & list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto & e : list) {
      arr.push_back({{"name", e.name}, {"seed", e.seed}, {"dir", e.dir}, {"perceived", e.perceived}});
    }
    return arr;
  };
  return {{"version", m.version},
          {"grid", {{"side", m.config.grid_side}, {"extent", m.config.extent}, {"resolution", m.config.resolution()}}},
          {"frame_rate", kFrameRate},
          {"input_frames", m.config.input_frames},
          {"target_frames", m.config.future_steps + 1},
          {"generation", {{"seed", m.seed}, {"config_hash", m.config_hash}}},
          {"config", dataset_config_to_json(m.config)},
          {"train", entries(m.train)},
          {"val", entries(m.val)},
          {"skipped_seeds", m.skipped}};
}

Manifest manifest_from_json(const nlohmann::json & j)
{
  Manifest m;
  try {
    m.version = j.at("version").get<int>();
    if (m.version != 1) {
      throw FormatError("unsupported manifest version " + std::to_string(m.version));
    }
    m.config = dataset_config_from_json(j.at("config"));
    m.seed = j.at("generation").at("seed").get<std::uint64_t>();
    m.config_hash = j.at("generation").at("config_hash").get<std::string>();
    auto entries = [](const nlohmann::json & arr) {
      std::vector<SequenceEntry> out;
      for (const auto & e : arr) {
        out.push_back({e.at("name").get<std::string>(), e.at("seed").get<std::uint64_t>(),
                       e.at("dir").get<std::string>(), e.at("perceived").get<std::vector<int>>()});
      }
      return out;
    };
    m.train = entries(j.at("train"));
    m.val = entries(j.at("val"));
    m.skipped = j.at("skipped_seeds").get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception & e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  } catch (const std::invalid_argument & e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  if (m.config_hash != config_hash(dataset_config_to_json(m.config))) {
    throw FormatError("manifest config hash does not match its config");
  }
  if (static_cast<int>(m.train.size()) != m.config.n_train || static_cast<int>(m.val.size()) != m.config.n_val) {
    throw FormatError("manifest sequence counts do not match its config");
  }
  return m;
}

Manifest generate_dataset(const fs::path & root, std::uint64_t seed, const DatasetConfig & config,
                          const GenerateOptions & options)
{
  config.validate();
  fs::create_directories(root);
  Manifest m;
  m.config = config;
  m.seed = seed;
  m.config_hash = config_hash(dataset_config_to_json(config));
  std::mutex log_mutex;
  auto log = [&](const std::string & msg) {
    if (options.log) {
      std::lock_guard<std::mutex> lock(log_mutex);
      options.log(msg);
    }
  };

  auto run_split = [&](const std::string & split, std::uint64_t first_seed, int count,
                       std::vector<SequenceEntry> & entries) {
    // Candidates are generated in fixed-size rounds; results are committed in
    // seed order so the outcome is independent of the worker count.
    std::uint64_t next = first_seed;
    const int workers = std::max(1, options.workers);
    const std::uint64_t max_attempts = static_cast<std::uint64_t>(count) * 4 + 16;
    while (static_cast<int>(entries.size()) < count) {
      if (next - first_seed >= max_attempts) {
        throw std::runtime_error("too many scenario generation failures in split " + split);
      }
      const int batch = count - static_cast<int>(entries.size());
      std::vector<std::optional<SequenceData>> results(static_cast<std::size_t>(batch));
      std::vector<std::string> errors(static_cast<std::size_t>(batch));
      parallel_for(static_cast<std::size_t>(batch), workers, [&](std::size_t i) {
        try {
          results[i] = generate_sequence(next + i, config);
        } catch (const GenerationError & e) {
          errors[i] = e.what();
        }
      });
      for (int i = 0; i < batch; ++i) {
        const std::uint64_t s = next + static_cast<std::uint64_t>(i);
        auto & r = results[static_cast<std::size_t>(i)];
        if (!r) {
          m.skipped.push_back(s);
          log("skipped seed " + std::to_string(s) + ": " + errors[static_cast<std::size_t>(i)]);
          continue;
        }
        char name[32];
        std::snprintf(name, sizeof(name), "%s_%05zu", split.c_str(), entries.size());
        SequenceEntry e{name, s, split + "/" + name, std::vector<int>(r->perceived.begin(), r->perceived.end())};
        write_sequence(root / e.dir, *r, config);
        entries.push_back(std::move(e));
        r.reset();
      }
      next += static_cast<std::uint64_t>(batch);
    }
    log(split + ": " + std::to_string(entries.size()) + " sequences");
  };
  run_split("train", seed, config.n_train, m.train);
  run_split("val", seed + config.val_seed_offset, config.n_val, m.val);
  write_text(root / kManifestFile, manifest_to_json(m).dump(1) + "\n");
  return m;
}

Manifest load_manifest(const fs::path & root)
{
  const fs::path path = root / kManifestFile;
  if (!fs::exists(path)) {
    throw FormatError("no manifest at " + path.string());
  }
  Manifest m = manifest_from_json(read_json(path));
  const auto files = expected_files(m.config);
  for (const auto * split : {&m.train, &m.val}) {
    for (const auto & e : *split) {
      const fs::path dir = root / e.dir;
      try {
        scenario_from_json(read_json(dir / "scenario.json"));
      } catch (const std::invalid_argument & ex) {
        throw FormatError((dir / "scenario.json").string() + ": " + ex.what());
      } catch (const nlohmann::json::exception & ex) {
        throw FormatError((dir / "scenario.json").string() + ": " + ex.what());
      }
      for (const auto & f : files) {
        load_checked(dir / f.name, f);
      }
    }
  }
  return m;
}

SequenceSample make_sample(const std::vector<DogmFrame> & dogm, const std::vector<SemanticGrid> & semantics,
                           const RasterMap & map, const std::vector<VehicleGrid> & targets)
{
  if (dogm.empty() || dogm.size() != semantics.size()) {
    throw std::invalid_argument("make_sample: need one semantic grid per DOGM frame");
  }
  const int S = dogm[0].spec.cells_per_side();
  const std::size_t plane = static_cast<std::size_t>(S) * S;
  SequenceSample s;
  s.inputs = ad::Tensor<float>({static_cast<int>(dogm.size()), 4, S, S});
  for (std::size_t n = 0; n < dogm.size(); ++n) {
    float * dst = s.inputs.data() + n * 4 * plane;
    const std::array<const std::vector<float> *, 3> src{&dogm[n].plane(kUnknown), &dogm[n].plane(kDynamic),
                                                        &dogm[n].plane(kStatic)};
    for (std::size_t ch = 0; ch < 3; ++ch) {
      std::copy(src[ch]->begin(), src[ch]->end(), dst + ch * plane);
    }
    for (std::size_t i = 0; i < plane; ++i) {
      dst[3 * plane + i] = semantics[n].labels[i] ? 1.0F : 0.0F;
    }
  }
  s.map = ad::Tensor<float>({1, 3, S, S});
  for (std::size_t ch = 0; ch < 3; ++ch) {
    std::copy(map.channels[ch].begin(), map.channels[ch].end(), s.map.data() + ch * plane);
  }
  if (!targets.empty()) {
    s.targets = ad::Tensor<float>({1, static_cast<int>(targets.size()), S, S});
    for (std::size_t k = 0; k < targets.size(); ++k) {
      std::copy(targets[k].occupancy.begin(), targets[k].occupancy.end(), s.targets.data() + k * plane);
    }
  }
  return s;
}

LoadedSequence load_sequence(const fs::path & root, const Manifest & manifest, const SequenceEntry & entry,
                             const LoadOptions & options)
{
  const DatasetConfig & c = manifest.config;
  const fs::path dir = root / entry.dir;
  const auto files = expected_files(c);
  LoadedSequence out;
  try {
    out.scenario = scenario_from_json(read_json(dir / "scenario.json"));
  } catch (const std::invalid_argument & ex) {
    throw FormatError((dir / "scenario.json").string() + ": " + ex.what());
  }
  out.spec = anchor_from_ego(out.scenario.ego.poses.at(static_cast<std::size_t>(c.present_frame())), c.extent,
                             c.resolution());
  out.perceived = std::set<int>(entry.perceived.begin(), entry.perceived.end());
  const std::size_t plane = out.spec.cell_count();

  const GrdTensor dogm = load_checked(dir / files[0].name, files[0]);
  for (int n = 0; n < c.input_frames; ++n) {
    DogmFrame f(out.spec);
    for (std::size_t ch = 0; ch < 4; ++ch) {
      const float * src = dogm.f32.data() + (static_cast<std::size_t>(n) * 4 + ch) * plane;
      f.planes[ch].assign(src, src + plane);
    }
    out.dogm.push_back(std::move(f));
  }
  const GrdTensor sem = load_checked(dir / (options.noisy_semantics ? files[2].name : files[1].name),
                                     options.noisy_semantics ? files[2] : files[1]);
  std::vector<SemanticGrid> labels;
  for (int n = 0; n < c.input_frames; ++n) {
    SemanticGrid g(out.spec);
    const std::uint8_t * src = sem.u8.data() + static_cast<std::size_t>(n) * plane;
    g.labels.assign(src, src + plane);
    labels.push_back(std::move(g));
  }
  const GrdTensor map = load_checked(dir / files[3].name, files[3]);
  out.map = RasterMap(out.spec);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    out.map.channels[ch].assign(map.f32.data() + ch * plane, map.f32.data() + (ch + 1) * plane);
  }
  const GrdTensor targets = load_checked(dir / files[4].name, files[4]);
  for (int k = 0; k <= c.future_steps; ++k) {
    VehicleGrid g(out.spec);
    for (std::size_t i = 0; i < plane; ++i) {
      g.occupancy[i] = targets.u8[static_cast<std::size_t>(k) * plane + i] ? 1.0F : 0.0F;
    }
    out.targets.push_back(std::move(g));
  }
  out.sample = make_sample(out.dogm, labels, out.map, out.targets);
  return out;
}

void check_geometry(const ModelConfig & model, const DatasetConfig & data)
{
  auto describe_model = [&] {
    std::ostringstream os;
    os << "model grid " << model.grid_side << ", " << model.input_frames << " input frames, "
       << model.future_steps << " future steps";
    return os.str();
  };
  auto describe_data = [&] {
    std::ostringstream os;
    os << "dataset grid " << data.grid_side << ", " << data.input_frames << " input frames, " << data.future_steps
       << " future steps";
    return os.str();
  };
  if (model.grid_side != data.grid_side || model.input_frames != data.input_frames ||
      model.future_steps != data.future_steps) {
    throw std::invalid_argument("geometry mismatch: " + describe_model() + " vs " + describe_data());
  }
}

}  // namespace gridcast
