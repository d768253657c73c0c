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

// The operations behind the `gridcast` command line.
//
// Output layouts:
//   train   <out>/model.ckpt, loss.csv, timing.csv
//   eval    <out>/report.json, retention.csv
//   ablate  <out>/summary.csv, summary.json, per_seed/<ablation>_seed<k>.json,
//           runs/<ablation>_seed<k>/{model.ckpt, loss.csv, timing.csv}

#ifndef GRIDCAST__COMMANDS_HPP_
#define GRIDCAST__COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcast/dataset.hpp"
#include "gridcast/evaluate.hpp"
#include "gridcast/predictor.hpp"
#include "gridcast/semantic_fusion.hpp"

namespace gridcast
{

/// Bad arguments; the command line exits with status 2.
class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

using LogFn = std::function<void(const std::string &)>;

/// Contents of a `--config` file: optional "dataset", "model" and "train"
/// sections.
struct RunConfig
{
  DatasetConfig dataset;
  ModelConfig model;
  TrainConfig train;
};

nlohmann::json run_config_to_json(const RunConfig & c);
RunConfig run_config_from_json(const nlohmann::json & j);
/// Throws std::runtime_error when the file is missing or malformed.
RunConfig load_run_config(const std::filesystem::path & path);

/// The flag when given, else GRIDCAST_WORKERS, else 1.
int resolve_workers(std::optional<int> flag);

/// Throws UsageError listing the valid names.
void require_ablation(const std::string & name);

struct GenDataOptions
{
  std::uint64_t seed = 42;
  DatasetConfig config;
  std::filesystem::path out;
  int workers = 1;
  LogFn log;
};

Manifest cmd_gen_data(const GenDataOptions & o);

struct TrainOptions
{
  std::filesystem::path data;
  RunConfig config;
  std::string ablation = "full";
  std::filesystem::path out;
  LogFn log;
};

/// Model geometry is taken from the dataset; `config.train.seed` seeds both
/// initialization and shuffling.
TrainResult cmd_train(const TrainOptions & o);

struct EvalCommandOptions
{
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::filesystem::path out;
  bool include_baselines = false;
  bool noisy_semantics = false;
  bool write_predictions = false;
  int workers = 1;
};

EvalResult cmd_eval(const EvalCommandOptions & o);

struct AblateOptions
{
  std::filesystem::path data;
  RunConfig config;
  std::vector<std::uint64_t> seeds{42, 43, 44};
  std::filesystem::path out;
  int workers = 1;
  LogFn log;
};

struct AblationRow
{
  std::string ablation;
  std::vector<double> iou;  // per seed
  std::vector<double> auc;
  std::vector<double> soft_iou;

  double mean_iou() const;
  double mean_auc() const;
  double mean_soft_iou() const;
};

struct AblationSummary
{
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;  // dogm, dogm+map, dogm+sem, full

  const AblationRow & row(const std::string & ablation) const;
};

AblationSummary cmd_ablate(const AblateOptions & o);
std::string ablation_summary_csv(const AblationSummary & s);
nlohmann::json ablation_summary_json(const AblationSummary & s);

std::vector<std::filesystem::path> cmd_render(const std::filesystem::path & input, const std::filesystem::path & out,
                                              int scale = 4);

struct CalibrateOptions
{
  std::uint64_t seed = 1000;
  int scenarios = 200;
  DatasetConfig config;
  LogFn log;
};

NoiseFit cmd_calibrate_noise(const CalibrateOptions & o);

/// Samples of a split, loaded in entry order.
std::vector<SequenceSample> load_samples(const std::filesystem::path & root, const Manifest & manifest,
                                         const std::vector<SequenceEntry> & entries, const LoadOptions & options = {});

}  // namespace gridcast

#endif  // GRIDCAST__COMMANDS_HPP_
