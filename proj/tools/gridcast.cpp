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

// gridcast gen-data | train | eval | ablate | render | calibrate-noise
//
// Exit status: 0 success, 2 usage error, 1 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridcast/commands.hpp"

namespace
{

using namespace gridcast;

constexpr int kUsage = 2;
constexpr int kRuntime = 1;

void log_line(const std::string & msg) { std::cerr << msg << '\n'; }

RunConfig config_or_default(const std::string & path) { return path.empty() ? RunConfig{} : load_run_config(path); }

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Occupancy grid motion prediction on synthetic driving scenes"};
  app.require_subcommand(1);

  std::optional<int> workers;
  std::string config_path;
  std::string out;
  std::uint64_t seed = 42;

  auto add_common = [&](CLI::App * cmd) {
    cmd->add_option("--workers", workers, "Worker threads (default: $GRIDCAST_WORKERS or 1)");
    cmd->add_option("--config", config_path, "JSON config with dataset/model/train sections");
  };

  auto * gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  add_common(gen);
  gen->add_option("--seed", seed, "Dataset seed")->capture_default_str();
  gen->add_option("--out", out, "Output directory")->required();
  std::optional<int> n_train;
  std::optional<int> n_val;
  gen->add_option("--n-train", n_train, "Training sequences (overrides config)");
  gen->add_option("--n-val", n_val, "Validation sequences (overrides config)");

  std::string data;
  std::string ablation = "full";
  std::optional<std::uint64_t> train_seed;
  std::optional<int> epochs;
  auto * tr = app.add_subcommand("train", "Train the predictor");
  add_common(tr);
  tr->add_option("--data", data, "Dataset directory")->required();
  tr->add_option("--out", out, "Output directory")->required();
  tr->add_option("--ablation", ablation, "full, dogm, dogm+map or dogm+sem")->capture_default_str();
  tr->add_option("--seed", train_seed, "Training seed (overrides config)");
  tr->add_option("--epochs", epochs, "Epochs (overrides config)");

  std::string checkpoint;
  bool include_baselines = false;
  bool noisy = false;
  bool predictions = false;
  auto * ev = app.add_subcommand("eval", "Evaluate a checkpoint on the validation split");
  add_common(ev);
  ev->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  ev->add_option("--data", data, "Dataset directory")->required();
  ev->add_option("--out", out, "Output directory")->required();
  ev->add_flag("--include-baselines", include_baselines, "Also score persistence and constant velocity");
  ev->add_flag("--noisy-semantics", noisy, "Use the corrupted semantic inputs");
  ev->add_flag("--predictions", predictions, "Write per-sequence probabilities");

  std::vector<std::uint64_t> seeds{42, 43, 44};
  auto * ab = app.add_subcommand("ablate", "Train and evaluate all four input configurations");
  add_common(ab);
  ab->add_option("--data", data, "Dataset directory")->required();
  ab->add_option("--out", out, "Output directory")->required();
  ab->add_option("--seed", seeds, "Training seeds")->capture_default_str();
  ab->add_option("--epochs", epochs, "Epochs (overrides config)");

  std::string input;
  int scale = 4;
  auto * re = app.add_subcommand("render", "Render a GRD1 grid, retention CSV or report");
  re->add_option("input", input, "Input file")->required();
  re->add_option("--out", out, "Output directory")->required();
  re->add_option("--scale", scale, "Pixels per cell")->capture_default_str();

  int scenarios = 200;
  std::uint64_t calib_seed = 1000;
  auto * ca = app.add_subcommand("calibrate-noise", "Fit the semantic noise model");
  ca->add_option("--config", config_path, "JSON config with a dataset section");
  ca->add_option("--seed", calib_seed, "First scenario seed")->capture_default_str();
  ca->add_option("--scenarios", scenarios, "Calibration scenarios")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    const int n_workers = resolve_workers(workers);
    if (*gen) {
      RunConfig rc = config_or_default(config_path);
      if (n_train) {
        rc.dataset.n_train = *n_train;
      }
      if (n_val) {
        rc.dataset.n_val = *n_val;
      }
      const Manifest m = cmd_gen_data({seed, rc.dataset, out, n_workers, log_line});
      std::cout << "wrote " << m.train.size() << " train / " << m.val.size() << " val sequences to " << out << '\n';
    } else if (*tr) {
      require_ablation(ablation);
      RunConfig rc = config_or_default(config_path);
      if (train_seed) {
        rc.train.seed = *train_seed;
      }
      if (epochs) {
        rc.train.epochs = *epochs;
      }
      rc.train.workers = n_workers;
      cmd_train({data, rc, ablation, out, log_line});
      std::cout << "wrote " << (std::filesystem::path(out) / "model.ckpt").string() << '\n';
    } else if (*ev) {
      EvalCommandOptions o;
      o.checkpoint = checkpoint;
      o.data = data;
      o.out = out;
      o.include_baselines = include_baselines;
      o.noisy_semantics = noisy;
      o.write_predictions = predictions;
      o.workers = n_workers;
      const EvalResult r = cmd_eval(o);
      for (const auto & [name, s] : r.systems) {
        std::printf("%-15s soft-IoU %.4f  IoU %.4f  AUC %.4f\n", name.c_str(), s.mean_soft_iou(), s.mean_iou(),
                    s.mean_auc());
      }
    } else if (*ab) {
      AblateOptions o;
      o.data = data;
      o.config = config_or_default(config_path);
      if (epochs) {
        o.config.train.epochs = *epochs;
      }
      o.config.train.workers = n_workers;
      o.seeds = seeds;
      o.out = out;
      o.workers = n_workers;
      o.log = log_line;
      std::cout << ablation_summary_csv(cmd_ablate(o));
    } else if (*re) {
      for (const auto & p : cmd_render(input, out, scale)) {
        std::cout << p.string() << '\n';
      }
    } else if (*ca) {
      CalibrateOptions o;
      o.seed = calib_seed;
      o.scenarios = scenarios;
      o.config = config_or_default(config_path).dataset;
      o.log = log_line;
      const NoiseFit fit = cmd_calibrate_noise(o);
      nlohmann::json j = {{"noise", noise_params_to_json(fit.params)},
                          {"iou", fit.quality.iou},
                          {"precision", fit.quality.precision},
                          {"recall", fit.quality.recall}};
      std::cout << j.dump(2) << '\n';
    }
  } catch (const UsageError & e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return 0;
}
