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

#include "gridcast/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gridcast/autodiff/checkpoint.hpp"
#include "gridcast/render.hpp"

namespace gridcast
{

namespace
{

void say(const LogFn & log, const std::string & msg)
{
  if (log) {
    log(msg);
  }
}

void write_text(const std::filesystem::path & p, const std::string & s)
{
  std::ofstream os(p, std::ios::binary);
  os << s;
  if (!os) {
    throw std::runtime_error("cannot write " + p.string());
  }
}

std::string format(const char * fmt, double a, double b = 0.0, double c = 0.0)
{
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

nlohmann::json train_config_to_json(const TrainConfig & c)
{
  return {{"epochs", c.epochs}, {"batch_size", c.batch_size}, {"seed", c.seed}, {"workers", c.workers}};
}

TrainConfig train_config_from_json(const nlohmann::json & j)
{
  TrainConfig c;
  for (const auto & [key, value] : j.items()) {
    if (key == "epochs") {
      c.epochs = value.get<int>();
    } else if (key == "batch_size") {
      c.batch_size = value.get<int>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "workers") {
      c.workers = value.get<int>();
    } else {
      throw std::invalid_argument("unknown train config key '" + key + "'");
    }
  }
  if (c.epochs < 1 || c.batch_size < 1 || c.workers < 1) {
    throw std::invalid_argument("train config: epochs, batch_size and workers must be >= 1");
  }
  return c;
}

double mean_of(const std::vector<double> & v)
{
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

nlohmann::json run_config_to_json(const RunConfig & c)
{
  return {{"dataset", dataset_config_to_json(c.dataset)},
          {"model", model_config_to_json(c.model)},
          {"train", train_config_to_json(c.train)}};
}

RunConfig run_config_from_json(const nlohmann::json & j)
{
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  RunConfig c;
  for (const auto & [key, value] : j.items()) {
    if (key == "dataset") {
      c.dataset = dataset_config_from_json(value);
    } else if (key == "model") {
      c.model = model_config_from_json(value);
    } else if (key == "train") {
      c.train = train_config_from_json(value);
    } else {
      throw std::invalid_argument("unknown config section '" + key + "' (valid: dataset, model, train)");
    }
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open config " + path.string());
  }
  try {
    return run_config_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception & e) {
    throw std::runtime_error("bad config " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument & e) {
    throw std::runtime_error("bad config " + path.string() + ": " + e.what());
  }
}

int resolve_workers(std::optional<int> flag)
{
  if (flag) {
    if (*flag < 1) {
      throw UsageError("--workers must be >= 1");
    }
    return *flag;
  }
  if (const char * env = std::getenv("GRIDCAST_WORKERS"); env != nullptr && *env != '\0') {
    char * end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
      throw UsageError(std::string("GRIDCAST_WORKERS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(v);
  }
  return 1;
}

void require_ablation(const std::string & name)
{
  const auto & names = ablation_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) {
    return;
  }
  std::string valid;
  for (const auto & n : names) {
    valid += (valid.empty() ? "" : ", ") + n;
  }
  throw UsageError("unknown ablation '" + name + "' (valid: " + valid + ")");
}

Manifest cmd_gen_data(const GenDataOptions & o)
{
  GenerateOptions g;
  g.workers = o.workers;
  g.log = o.log;
  return generate_dataset(o.out, o.seed, o.config, g);
}

std::vector<SequenceSample> load_samples(const std::filesystem::path & root, const Manifest & manifest,
                                         const std::vector<SequenceEntry> & entries, const LoadOptions & options)
{
  std::vector<SequenceSample> out;
  out.reserve(entries.size());
  for (const auto & e : entries) {
    out.push_back(load_sequence(root, manifest, e, options).sample);
  }
  return out;
}

TrainResult cmd_train(const TrainOptions & o)
{
  require_ablation(o.ablation);
  const Manifest manifest = load_manifest(o.data);
  ModelConfig model = apply_ablation(o.config.model, o.ablation);
  model.input_frames = manifest.config.input_frames;
  model.future_steps = manifest.config.future_steps;
  model.grid_side = manifest.config.grid_side;
  model.validate();

  const auto samples = load_samples(o.data, manifest, manifest.train);
  say(o.log, "training '" + o.ablation + "' on " + std::to_string(samples.size()) + " sequences");
  TrainResult r = train(samples, model, o.config.train, [&](const EpochLog & e) {
    say(o.log, "epoch " + std::to_string(e.epoch) +
                   format(" loss %.6f bce %.6f kl %.6f", e.total, e.bce, e.kl) + format(" (%.1f s)", e.wall_seconds));
  });

  std::filesystem::create_directories(o.out);
  const nlohmann::json meta = {{"ablation", o.ablation},
                               {"dataset_hash", manifest.config_hash},
                               {"train", train_config_to_json(o.config.train)}};
  ad::save_checkpoint(o.out / "model.ckpt", r.model.to_checkpoint(meta));
  write_text(o.out / "loss.csv", epoch_log_csv(r.log));
  write_text(o.out / "timing.csv", epoch_timing_csv(r.log));
  return r;
}

EvalResult cmd_eval(const EvalCommandOptions & o)
{
  const Manifest manifest = load_manifest(o.data);
  const auto model = Predictor<float>::from_checkpoint(ad::load_checkpoint(o.checkpoint));
  EvalOptions eo;
  eo.include_baselines = o.include_baselines;
  eo.noisy_semantics = o.noisy_semantics;
  eo.workers = o.workers;
  if (o.write_predictions) {
    eo.predictions_dir = o.out / "predictions";
  }
  std::filesystem::create_directories(o.out);
  EvalResult r = evaluate(model, o.data, manifest, eo);
  nlohmann::json report = eval_report_json(r);
  report["dataset_hash"] = manifest.config_hash;
  report["noisy_semantics"] = o.noisy_semantics;
  report["model"] = model_config_to_json(model.config());
  write_text(o.out / "report.json", dump_fixed(report));
  write_text(o.out / "retention.csv", retention_csv(r));
  return r;
}

double AblationRow::mean_iou() const { return mean_of(iou); }
double AblationRow::mean_auc() const { return mean_of(auc); }
double AblationRow::mean_soft_iou() const { return mean_of(soft_iou); }

const AblationRow & AblationSummary::row(const std::string & ablation) const
{
  for (const auto & r : rows) {
    if (r.ablation == ablation) {
      return r;
    }
  }
  throw std::out_of_range("no ablation row '" + ablation + "'");
}

AblationSummary cmd_ablate(const AblateOptions & o)
{
  if (o.seeds.empty()) {
    throw UsageError("ablate needs at least one seed");
  }
  load_manifest(o.data);
  AblationSummary s;
  s.seeds = o.seeds;
  const auto per_seed = o.out / "per_seed";
  std::filesystem::create_directories(per_seed);
  for (const auto & name : ablation_names()) {
    AblationRow row;
    row.ablation = name;
    for (const std::uint64_t seed : o.seeds) {
      const std::string tag = name + "_seed" + std::to_string(seed);
      TrainOptions t;
      t.data = o.data;
      t.config = o.config;
      t.config.train.seed = seed;
      t.ablation = name;
      t.out = o.out / "runs" / tag;
      t.log = o.log;
      cmd_train(t);

      EvalCommandOptions e;
      e.checkpoint = t.out / "model.ckpt";
      e.data = o.data;
      e.out = t.out;
      e.workers = o.workers;
      const EvalResult r = cmd_eval(e);
      const SystemScores & m = r.systems.at("model");
      row.iou.push_back(m.mean_iou());
      row.auc.push_back(m.mean_auc());
      row.soft_iou.push_back(m.mean_soft_iou());
      std::filesystem::copy_file(t.out / "report.json", per_seed / (tag + ".json"),
                                 std::filesystem::copy_options::overwrite_existing);
      say(o.log, tag + format(": IoU %.4f AUC %.4f soft-IoU %.4f", row.iou.back(), row.auc.back(),
                              row.soft_iou.back()));
    }
    s.rows.push_back(std::move(row));
  }
  write_text(o.out / "summary.csv", ablation_summary_csv(s));
  write_text(o.out / "summary.json", dump_fixed(ablation_summary_json(s)));
  return s;
}

std::string ablation_summary_csv(const AblationSummary & s)
{
  std::ostringstream os;
  os << "configuration,iou,auc\n";
  char buf[128];
  for (const auto & r : s.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", r.ablation.c_str(), r.mean_iou(), r.mean_auc());
    os << buf;
  }
  return os.str();
}

nlohmann::json ablation_summary_json(const AblationSummary & s)
{
  nlohmann::json rows = nlohmann::json::array();
  for (const auto & r : s.rows) {
    nlohmann::json per_seed = nlohmann::json::array();
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
      per_seed.push_back({{"seed", s.seeds[i]}, {"iou", r.iou[i]}, {"auc", r.auc[i]}, {"soft_iou", r.soft_iou[i]}});
    }
    rows.push_back({{"configuration", r.ablation},
                    {"iou", r.mean_iou()},
                    {"auc", r.mean_auc()},
                    {"soft_iou", r.mean_soft_iou()},
                    {"per_seed", per_seed}});
  }
  return {{"seeds", s.seeds}, {"rows", rows}};
}

std::vector<std::filesystem::path> cmd_render(const std::filesystem::path & input, const std::filesystem::path & out,
                                              int scale)
{
  if (scale < 1) {
    throw UsageError("--scale must be >= 1");
  }
  try {
    return render_file(input, out, scale);
  } catch (const UnsupportedInput & e) {
    throw UsageError(e.what());
  }
}

NoiseFit cmd_calibrate_noise(const CalibrateOptions & o)
{
  if (o.scenarios < 1) {
    throw UsageError("--scenarios must be >= 1");
  }
  const auto clean = clean_semantics(o.seed, o.scenarios, o.config);
  say(o.log, "fitting on " + std::to_string(clean.size()) + " scenarios");
  return fit_noise(clean, o.seed);
}

}  // namespace gridcast
