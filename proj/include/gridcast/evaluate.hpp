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

// Validation-split scoring of a trained model and the OGM baselines.

#ifndef GRIDCAST__EVALUATE_HPP_
#define GRIDCAST__EVALUATE_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcast/dataset.hpp"
#include "gridcast/metrics.hpp"
#include "gridcast/predictor.hpp"

namespace gridcast
{

/// Scores of one system; index k of every per-step vector is k steps after
/// the present (index 0 is the present frame).
struct SystemScores
{
  std::vector<double> soft_iou;
  std::vector<double> iou;
  std::vector<double> auc;
  std::vector<int> auc_excluded;  // sequences with an empty target at that step
  std::vector<RetentionStep> retention;

  /// Means over the future steps 1..P.
  double mean_soft_iou() const;
  double mean_iou() const;
  double mean_auc() const;
};

struct EvalOptions
{
  bool include_baselines = false;
  bool noisy_semantics = false;
  int workers = 1;
  /// When set, per-sequence model probabilities are written here as GRD1.
  std::filesystem::path predictions_dir;
};

struct EvalResult
{
  int sequences = 0;
  double step_seconds = 0.5;
  std::map<std::string, SystemScores> systems;  // "model", "persistence", "const_velocity"
};

/// Per-step predictions of every system for one sequence. Baselines are raw
/// OGM forecasts, before cleanup.
struct SequencePredictions
{
  std::vector<VehicleGrid> model;
  std::vector<VehicleGrid> persistence;
  std::vector<VehicleGrid> const_velocity;
};

std::vector<VehicleGrid> model_grids(const Predictor<float> & model, const LoadedSequence & seq);

SequencePredictions predict_sequence(const Predictor<float> & model, const LoadedSequence & seq,
                                     bool include_baselines, const ConstVelocityParams & cv = {});

/// Returns the P + 1 model grids of one sequence.
using PredictFn = std::function<std::vector<VehicleGrid>(const LoadedSequence &)>;

/// Averages over sequences per step; AUC averages only sequences where it is defined.
EvalResult evaluate(const Predictor<float> & model, const std::filesystem::path & root, const Manifest & manifest,
                    const EvalOptions & options = {});
/// Same, with an arbitrary predictor in place of the network. `predict` must
/// be safe to call concurrently when options.workers > 1.
EvalResult evaluate(const PredictFn & predict, const std::filesystem::path & root, const Manifest & manifest,
                    const EvalOptions & options = {});

nlohmann::json eval_report_json(const EvalResult & r);
/// system,time_s,static_retained,static_total,static_percent,dynamic_retained,dynamic_total,dynamic_percent,excluded
std::string retention_csv(const EvalResult & r);

/// JSON text with sorted keys and every floating-point number printed with
/// six decimals.
std::string dump_fixed(const nlohmann::json & j, int indent = 2);

}  // namespace gridcast

#endif  // GRIDCAST__EVALUATE_HPP_
