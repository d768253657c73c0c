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

// Spatio-temporal conditional-variational occupancy predictor.
//
//   frames X (4 ch) --enc--+                      +-- present head --> N(mu_p, sigma_p)
//                          +--> 4 x ConvLSTM --> H_t
//   map M (3 ch) --enc'----+                      +-- future head (H_t, Y) --> N(mu_f, sigma_f)
//
//   z ~ future (training) or mu_p (inference), broadcast over the feature grid
//   3 x ConvGRU: step 0 consumes [H_t, z], step k consumes [s_{k-1}, z]
//   shared deconv decoder: s_k --> logits of frame t + k, k = 0..P
//
// With base width c the encoders are conv3x3/s2 (c), conv3x3/s2 (2c),
// conv3x3/s1 (2c), so recurrent state lives at side/4 with 2c channels.

#ifndef GRIDCAST__PREDICTOR_HPP_
#define GRIDCAST__PREDICTOR_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcast/autodiff/checkpoint.hpp"
#include "gridcast/autodiff/ops.hpp"
#include "gridcast/autodiff/optim.hpp"

namespace gridcast
{

enum class KlDirection { kFutureToPresent, kPresentToFuture };

struct ModelConfig
{
  int input_frames = 10;
  int future_steps = 5;
  int grid_side = 64;
  int latent_dim = 32;
  int base_channels = 4;
  int lstm_layers = 4;
  int gru_layers = 3;
  bool use_map = true;
  bool use_semantics = true;
  double lambda_bce = 1.0;
  double lambda_kl = 0.005;
  double pos_weight = 5.0;
  double lr = 2e-4;
  KlDirection kl_direction = KlDirection::kFutureToPresent;

  int hidden_channels() const { return 2 * base_channels; }
  int output_frames() const { return future_steps + 1; }
  void validate() const;
};

nlohmann::json model_config_to_json(const ModelConfig & c);
/// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig model_config_from_json(const nlohmann::json & j);

/// Named ablation presets: full, dogm, dogm+map, dogm+sem.
ModelConfig apply_ablation(ModelConfig c, const std::string & name);
const std::vector<std::string> & ablation_names();

/// One training or evaluation sequence on the model grid.
struct SequenceSample
{
  ad::Tensor<float> inputs;   // [N, 4, S, S]: unknown, dynamic, static, semantic
  ad::Tensor<float> map;      // [1, 3, S, S]
  ad::Tensor<float> targets;  // [1, P + 1, S, S]; empty at inference
};

template <typename T>
struct PredictionBundle
{
  ad::Var<T> logits;  // [1, P + 1, S, S]
  ad::DiagGaussian<T> present;
  ad::DiagGaussian<T> future;  // undefined at inference
};

template <typename T>
struct LossParts
{
  ad::Var<T> total;
  double bce = 0.0;
  double kl = 0.0;
};

template <typename T>
class Predictor
{
public:
  using Params = std::map<std::string, ad::Tensor<T>>;
  using Bound = std::map<std::string, ad::Var<T>>;

  Predictor(const ModelConfig & config, std::uint64_t seed);
  Predictor(const ModelConfig & config, Params params);

  const ModelConfig & config() const { return config_; }
  Params & parameters() { return params_; }
  const Params & parameters() const { return params_; }
  std::size_t parameter_count() const;

  /// Leaf variables over the current parameter values for one graph.
  Bound bind(bool requires_grad) const;

  std::vector<ad::Var<T>> encode_inputs(const Bound & p, const SequenceSample & s) const;
  ad::Var<T> temporal_fuse(const Bound & p, const std::vector<ad::Var<T>> & features) const;
  ad::DiagGaussian<T> present_distribution(const Bound & p, const ad::Var<T> & h) const;
  /// Throws std::invalid_argument when `targets` is empty.
  ad::DiagGaussian<T> future_distribution(const Bound & p, const ad::Var<T> & h,
                                          const ad::Tensor<float> & targets) const;
  std::vector<ad::Var<T>> unroll_future(const Bound & p, const ad::Var<T> & h, const ad::Var<T> & z) const;
  /// Returns [1, P + 1, S, S] logits.
  ad::Var<T> decode_frames(const Bound & p, const std::vector<ad::Var<T>> & states) const;

  /// Training pass when `noise` is given (z sampled from the future distribution),
  /// otherwise inference from the present mean.
  PredictionBundle<T> forward(const Bound & p, const SequenceSample & s, const ad::Tensor<T> * noise) const;

  ad::Checkpoint to_checkpoint(const nlohmann::json & extra_meta = {}) const;
  static Predictor from_checkpoint(const ad::Checkpoint & ckpt);

private:
  ad::Var<T> encoder(const Bound & p, const std::string & prefix, ad::Var<T> x) const;

  ModelConfig config_;
  Params params_;
};

/// total = lambda_bce * BCE(logits, targets; pos_weight) + lambda_kl * KL
template <typename T>
LossParts<T> compute_loss(const PredictionBundle<T> & bundle, const ad::Tensor<float> & targets,
                          const ModelConfig & config);

struct TrainConfig
{
  int epochs = 20;
  int batch_size = 4;
  std::uint64_t seed = 42;
  int workers = 1;
};

struct EpochLog
{
  int epoch = 0;
  double total = 0.0;
  double bce = 0.0;
  double kl = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult
{
  Predictor<float> model;
  std::vector<EpochLog> log;
};

/// Mini-batch Adam. Per-sample gradients are reduced in sample order, so the
/// result does not depend on the worker count.
TrainResult train(const std::vector<SequenceSample> & data, const ModelConfig & config, const TrainConfig & train,
                  const std::function<void(const EpochLog &)> & on_epoch = {});

/// Losses only, so the file is reproducible; wall time goes to epoch_timing_csv.
std::string epoch_log_csv(const std::vector<EpochLog> & log);
std::string epoch_timing_csv(const std::vector<EpochLog> & log);

struct Inference
{
  ad::Tensor<float> probabilities;          // [P + 1, S, S]
  std::vector<ad::Tensor<float>> samples;   // optional draws from the present distribution
};

/// Latent = present mean; `samples` extra futures are drawn with `seed`.
Inference infer(const Predictor<float> & model, const SequenceSample & sample, int samples = 0,
                std::uint64_t seed = 0);

/// Throws std::invalid_argument when the sample does not match the model geometry.
void check_sample(const ModelConfig & config, const SequenceSample & sample, bool need_targets);

}  // namespace gridcast

#endif  // GRIDCAST__PREDICTOR_HPP_
