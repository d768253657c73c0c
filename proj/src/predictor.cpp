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

#include "gridcast/predictor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gridcast/parallel.hpp"

namespace gridcast
{

using ad::DiagGaussian;
using ad::Tensor;
using ad::Var;

namespace
{

constexpr double kLeakySlope = 0.1;

template <typename T>
Var<T> leaky(const Var<T> & x)
{
  return ad::leaky_relu(x, static_cast<T>(kLeakySlope));
}

std::string kl_direction_name(KlDirection d)
{
  return d == KlDirection::kFutureToPresent ? "future||present" : "present||future";
}

// How a parameter is initialised. Weights are uniform with variance
// gain / fan_in; biases start at zero except the LSTM forget gate, which
// starts at one.
enum class Init { kRectified, kGated, kBias, kLstmBias };

struct ParamDecl
{
  std::string name;
  ad::Shape shape;
  int fan_in;
  Init init;
};

std::vector<ParamDecl> declare(const ModelConfig & c)
{
  const int b = c.base_channels;
  const int hd = c.hidden_channels();
  const int latent = c.latent_dim;
  const int frames_out = c.output_frames();
  std::vector<ParamDecl> d;
  auto conv = [&](const std::string & name, int out, int in, int k, Init init = Init::kRectified) {
    d.push_back({name + ".w", {out, in, k, k}, in * k * k, init});
    d.push_back({name + ".b", {out}, in * k * k, Init::kBias});
  };
  auto deconv = [&](const std::string & name, int in, int out, int k) {
    // stride 2: each output sees a quarter of the kernel taps
    d.push_back({name + ".w", {in, out, k, k}, in * k * k / 4, Init::kRectified});
    d.push_back({name + ".b", {out}, in * k * k / 4, Init::kBias});
  };
  auto linear = [&](const std::string & name, int out, int in) {
    d.push_back({name + ".w", {out, in}, in, Init::kGated});
    d.push_back({name + ".b", {out}, in, Init::kBias});
  };
  auto encoder = [&](const std::string & name, int in) {
    conv(name + ".0", b, in, 3);
    conv(name + ".1", 2 * b, b, 3);
    conv(name + ".2", 2 * b, 2 * b, 3);
  };
  encoder("enc", 4);
  if (c.use_map) {
    encoder("map", 3);
  }
  const int feat = c.use_map ? 4 * b : 2 * b;
  for (int l = 0; l < c.lstm_layers; ++l) {
    const int in = (l == 0 ? feat : hd) + hd;
    d.push_back({"lstm." + std::to_string(l) + ".w", {4 * hd, in, 3, 3}, in * 9, Init::kGated});
    d.push_back({"lstm." + std::to_string(l) + ".b", {4 * hd}, in * 9, Init::kLstmBias});
  }
  conv("present.conv", hd, hd, 3);
  linear("present.fc", 2 * latent, hd);
  conv("future.tgt.0", b, frames_out, 3);
  conv("future.tgt.1", 2 * b, b, 3);
  conv("future.conv", hd, hd + 2 * b, 3);
  linear("future.fc", 2 * latent, hd);
  for (int l = 0; l < c.gru_layers; ++l) {
    const int in = (l == 0 ? hd + latent : hd) + hd;
    conv("gru." + std::to_string(l) + ".gates", 2 * hd, in, 3, Init::kGated);
    conv("gru." + std::to_string(l) + ".cand", hd, in, 3, Init::kGated);
  }
  deconv("dec.0", hd, b, 4);
  deconv("dec.1", b, b, 4);
  conv("dec.2", 1, b, 1, Init::kGated);
  return d;
}

template <typename T>
Var<T> to_var(const Tensor<float> & t)
{
  if constexpr (std::is_same_v<T, float>) {
    return Var<T>(t);
  } else {
    return Var<T>(t.cast<T>());
  }
}

template <typename T>
Var<T> zeros(ad::Shape shape)
{
  return Var<T>(Tensor<T>(std::move(shape)));
}

}  // namespace

// ---------------------------------------------------------------------------
// config

void ModelConfig::validate() const
{
  auto fail = [](const std::string & m) { throw std::invalid_argument("model config: " + m); };
  if (input_frames < 1) fail("input_frames must be >= 1");
  if (future_steps < 1) fail("future_steps must be >= 1");
  if (latent_dim < 1) fail("latent_dim must be >= 1");
  if (base_channels < 1) fail("base_channels must be >= 1");
  if (lstm_layers < 1 || gru_layers < 1) fail("recurrent stacks need at least one layer");
  if (grid_side < 8 || grid_side % 4 != 0) fail("grid_side must be a multiple of 4 and >= 8");
  if (!(pos_weight > 0.0)) fail("pos_weight must be positive");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (lambda_bce < 0.0 || lambda_kl < 0.0) fail("loss weights must be non-negative");
}

nlohmann::json model_config_to_json(const ModelConfig & c)
{
  return {{"input_frames", c.input_frames},
          {"future_steps", c.future_steps},
          {"grid_side", c.grid_side},
          {"latent_dim", c.latent_dim},
          {"base_channels", c.base_channels},
          {"lstm_layers", c.lstm_layers},
          {"gru_layers", c.gru_layers},
          {"use_map", c.use_map},
          {"use_semantics", c.use_semantics},
          {"lambda_bce", c.lambda_bce},
          {"lambda_kl", c.lambda_kl},
          {"pos_weight", c.pos_weight},
          {"lr", c.lr},
          {"kl_direction", kl_direction_name(c.kl_direction)}};
}

ModelConfig model_config_from_json(const nlohmann::json & j)
{
  ModelConfig c;
  const nlohmann::json defaults = model_config_to_json(c);
  for (const auto & [key, _] : j.items()) {
    if (!defaults.contains(key)) {
      throw std::invalid_argument("model config: unknown key '" + key + "'");
    }
  }
  c.input_frames = j.value("input_frames", c.input_frames);
  c.future_steps = j.value("future_steps", c.future_steps);
  c.grid_side = j.value("grid_side", c.grid_side);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  c.base_channels = j.value("base_channels", c.base_channels);
  c.lstm_layers = j.value("lstm_layers", c.lstm_layers);
  c.gru_layers = j.value("gru_layers", c.gru_layers);
  c.use_map = j.value("use_map", c.use_map);
  c.use_semantics = j.value("use_semantics", c.use_semantics);
  c.lambda_bce = j.value("lambda_bce", c.lambda_bce);
  c.lambda_kl = j.value("lambda_kl", c.lambda_kl);
  c.pos_weight = j.value("pos_weight", c.pos_weight);
  c.lr = j.value("lr", c.lr);
  const std::string dir = j.value("kl_direction", kl_direction_name(c.kl_direction));
  if (dir == "future||present") {
    c.kl_direction = KlDirection::kFutureToPresent;
  } else if (dir == "present||future") {
    c.kl_direction = KlDirection::kPresentToFuture;
  } else {
    throw std::invalid_argument("model config: kl_direction must be 'future||present' or 'present||future'");
  }
  c.validate();
  return c;
}

const std::vector<std::string> & ablation_names()
{
  static const std::vector<std::string> names{"full", "dogm", "dogm+map", "dogm+sem"};
  return names;
}

ModelConfig apply_ablation(ModelConfig c, const std::string & name)
{
  if (name == "full") {
    c.use_map = c.use_semantics = true;
  } else if (name == "dogm") {
    c.use_map = c.use_semantics = false;
  } else if (name == "dogm+map") {
    c.use_map = true;
    c.use_semantics = false;
  } else if (name == "dogm+sem") {
    c.use_map = false;
    c.use_semantics = true;
  } else {
    throw std::invalid_argument("unknown ablation '" + name + "' (valid: full, dogm, dogm+map, dogm+sem)");
  }
  return c;
}

void check_sample(const ModelConfig & c, const SequenceSample & s, bool need_targets)
{
  const int S = c.grid_side;
  if (s.inputs.shape() != ad::Shape{c.input_frames, 4, S, S}) {
    throw std::invalid_argument("sample inputs " + ad::shape_string(s.inputs.shape()) + " do not match model " +
                                ad::shape_string({c.input_frames, 4, S, S}));
  }
  if (c.use_map && s.map.shape() != ad::Shape{1, 3, S, S}) {
    throw std::invalid_argument("sample map " + ad::shape_string(s.map.shape()) + " does not match model " +
                                ad::shape_string({1, 3, S, S}));
  }
  if (need_targets) {
    if (s.targets.shape() != ad::Shape{1, c.output_frames(), S, S}) {
      throw std::invalid_argument("sample targets " + ad::shape_string(s.targets.shape()) +
                                  " do not match model " + ad::shape_string({1, c.output_frames(), S, S}));
    }
  }
}

// ---------------------------------------------------------------------------
// model

template <typename T>
Predictor<T>::Predictor(const ModelConfig & config, std::uint64_t seed) : config_(config)
{
  config_.validate();
  std::mt19937_64 rng(seed);
  for (const ParamDecl & d : declare(config_)) {
    Tensor<T> t(d.shape);
    if (d.init == Init::kLstmBias) {
      // gate order: input, forget, output, candidate
      const std::size_t hd = t.numel() / 4;
      std::fill(t.values().begin() + static_cast<std::ptrdiff_t>(hd),
                t.values().begin() + static_cast<std::ptrdiff_t>(2 * hd), T(1));
    } else if (d.init != Init::kBias) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const double gain = d.init == Init::kRectified ? 2.0 / (1.0 + kLeakySlope * kLeakySlope) : 1.0;
      const double bound = std::sqrt(3.0 * gain / std::max(1, d.fan_in));
      for (T & v : t.values()) {
        v = static_cast<T>(bound * u(rng));
      }
    }
    params_.emplace(d.name, std::move(t));
  }
}

template <typename T>
Predictor<T>::Predictor(const ModelConfig & config, Params params) : config_(config), params_(std::move(params))
{
  config_.validate();
  const auto decl = declare(config_);
  if (decl.size() != params_.size()) {
    throw std::invalid_argument("parameter set does not match the model config (" + std::to_string(params_.size()) +
                                " tensors, expected " + std::to_string(decl.size()) + ")");
  }
  for (const ParamDecl & d : decl) {
    auto it = params_.find(d.name);
    if (it == params_.end() || it->second.shape() != d.shape) {
      throw std::invalid_argument("parameter '" + d.name + "' missing or has the wrong shape for this model config");
    }
  }
}

template <typename T>
std::size_t Predictor<T>::parameter_count() const
{
  std::size_t n = 0;
  for (const auto & [_, t] : params_) {
    n += t.numel();
  }
  return n;
}

template <typename T>
typename Predictor<T>::Bound Predictor<T>::bind(bool requires_grad) const
{
  Bound b;
  for (const auto & [name, t] : params_) {
    b.emplace(name, Var<T>(t, requires_grad));
  }
  return b;
}

template <typename T>
Var<T> Predictor<T>::encoder(const Bound & p, const std::string & prefix, Var<T> x) const
{
  x = leaky(ad::conv2d(x, p.at(prefix + ".0.w"), p.at(prefix + ".0.b"), 2, 1));
  x = leaky(ad::conv2d(x, p.at(prefix + ".1.w"), p.at(prefix + ".1.b"), 2, 1));
  return leaky(ad::conv2d(x, p.at(prefix + ".2.w"), p.at(prefix + ".2.b"), 1, 1));
}

template <typename T>
std::vector<Var<T>> Predictor<T>::encode_inputs(const Bound & p, const SequenceSample & s) const
{
  check_sample(config_, s, false);
  const int S = config_.grid_side;
  const std::size_t plane = static_cast<std::size_t>(S) * S;
  Var<T> map_features;
  if (config_.use_map) {
    map_features = encoder(p, "map", to_var<T>(s.map));
  }
  std::vector<Var<T>> out;
  for (int n = 0; n < config_.input_frames; ++n) {
    Tensor<T> frame({1, 4, S, S});
    const float * src = s.inputs.data() + static_cast<std::size_t>(n) * 4 * plane;
    std::copy(src, src + 4 * plane, frame.data());
    if (!config_.use_semantics) {
      std::fill(frame.data() + 3 * plane, frame.data() + 4 * plane, T(0));
    }
    Var<T> f = encoder(p, "enc", Var<T>(std::move(frame)));
    out.push_back(config_.use_map ? ad::concat_channels<T>({f, map_features}) : f);
  }
  return out;
}

template <typename T>
Var<T> Predictor<T>::temporal_fuse(const Bound & p, const std::vector<Var<T>> & features) const
{
  if (features.empty()) {
    throw std::invalid_argument("temporal_fuse: empty feature sequence");
  }
  const auto & shape = features[0].shape();
  const ad::Shape state{1, config_.hidden_channels(), shape[2], shape[3]};
  std::vector<Var<T>> h(static_cast<std::size_t>(config_.lstm_layers), zeros<T>(state));
  std::vector<Var<T>> c = h;
  Var<T> top;
  for (const Var<T> & f : features) {
    Var<T> x = f;
    for (int l = 0; l < config_.lstm_layers; ++l) {
      const std::string name = "lstm." + std::to_string(l);
      auto [hn, cn] = ad::convlstm_cell<T>(x, h[static_cast<std::size_t>(l)], c[static_cast<std::size_t>(l)],
                                           {p.at(name + ".w"), p.at(name + ".b")});
      h[static_cast<std::size_t>(l)] = hn;
      c[static_cast<std::size_t>(l)] = cn;
      x = l == 0 ? hn : ad::add(hn, x);
    }
    top = x;
  }
  return top;
}

template <typename T>
DiagGaussian<T> Predictor<T>::present_distribution(const Bound & p, const Var<T> & h) const
{
  const Var<T> x = leaky(ad::conv2d(h, p.at("present.conv.w"), p.at("present.conv.b"), 1, 1));
  const Var<T> y = ad::linear(ad::global_avg_pool(x), p.at("present.fc.w"), p.at("present.fc.b"));
  const auto parts = ad::split_channels(y, {config_.latent_dim, config_.latent_dim});
  return {parts[0], parts[1]};
}

template <typename T>
DiagGaussian<T> Predictor<T>::future_distribution(const Bound & p, const Var<T> & h,
                                                  const Tensor<float> & targets) const
{
  if (targets.empty()) {
    throw std::invalid_argument("future_distribution needs the target frames");
  }
  Var<T> t = leaky(ad::conv2d(to_var<T>(targets), p.at("future.tgt.0.w"), p.at("future.tgt.0.b"), 2, 1));
  t = leaky(ad::conv2d(t, p.at("future.tgt.1.w"), p.at("future.tgt.1.b"), 2, 1));
  const Var<T> x =
    leaky(ad::conv2d(ad::concat_channels<T>({h, t}), p.at("future.conv.w"), p.at("future.conv.b"), 1, 1));
  const Var<T> y = ad::linear(ad::global_avg_pool(x), p.at("future.fc.w"), p.at("future.fc.b"));
  const auto parts = ad::split_channels(y, {config_.latent_dim, config_.latent_dim});
  return {parts[0], parts[1]};
}

template <typename T>
std::vector<Var<T>> Predictor<T>::unroll_future(const Bound & p, const Var<T> & h, const Var<T> & z) const
{
  const int side = h.shape()[2];
  const Var<T> zb = ad::broadcast_spatial(z, side, side);
  std::vector<Var<T>> g(static_cast<std::size_t>(config_.gru_layers),
                        zeros<T>({1, config_.hidden_channels(), side, side}));
  std::vector<Var<T>> states;
  Var<T> input = ad::concat_channels<T>({h, zb});
  for (int k = 0; k < config_.output_frames(); ++k) {
    Var<T> x = input;
    for (int l = 0; l < config_.gru_layers; ++l) {
      const std::string name = "gru." + std::to_string(l);
      const Var<T> hn = ad::convgru_cell<T>(x, g[static_cast<std::size_t>(l)],
                                            {p.at(name + ".gates.w"), p.at(name + ".gates.b"),
                                             p.at(name + ".cand.w"), p.at(name + ".cand.b")});
      g[static_cast<std::size_t>(l)] = hn;
      x = l == 0 ? hn : ad::add(hn, x);
    }
    states.push_back(x);
    input = ad::concat_channels<T>({x, zb});
  }
  return states;
}

template <typename T>
Var<T> Predictor<T>::decode_frames(const Bound & p, const std::vector<Var<T>> & states) const
{
  std::vector<Var<T>> frames;
  for (const Var<T> & s : states) {
    Var<T> y = leaky(ad::deconv2d(s, p.at("dec.0.w"), p.at("dec.0.b"), 2, 1));
    y = leaky(ad::deconv2d(y, p.at("dec.1.w"), p.at("dec.1.b"), 2, 1));
    frames.push_back(ad::conv2d(y, p.at("dec.2.w"), p.at("dec.2.b"), 1, 0));
  }
  return ad::concat_channels(frames);
}

template <typename T>
PredictionBundle<T> Predictor<T>::forward(const Bound & p, const SequenceSample & s, const Tensor<T> * noise) const
{
  PredictionBundle<T> out;
  const Var<T> h = temporal_fuse(p, encode_inputs(p, s));
  out.present = present_distribution(p, h);
  Var<T> z;
  if (noise) {
    out.future = future_distribution(p, h, s.targets);
    z = ad::sample(out.future, *noise);
  } else {
    z = out.present.mu;
  }
  out.logits = decode_frames(p, unroll_future(p, h, z));
  return out;
}

template <typename T>
ad::Checkpoint Predictor<T>::to_checkpoint(const nlohmann::json & extra_meta) const
{
  ad::Checkpoint ck;
  ck.meta = extra_meta.is_object() ? extra_meta : nlohmann::json::object();
  ck.meta["model"] = model_config_to_json(config_);
  for (const auto & [name, t] : params_) {
    if constexpr (std::is_same_v<T, float>) {
      ck.tensors.emplace(name, t);
    } else {
      ck.tensors.emplace(name, t.template cast<float>());
    }
  }
  return ck;
}

template <typename T>
Predictor<T> Predictor<T>::from_checkpoint(const ad::Checkpoint & ckpt)
{
  if (!ckpt.meta.contains("model")) {
    throw std::invalid_argument("checkpoint has no model config");
  }
  Params params;
  for (const auto & [name, t] : ckpt.tensors) {
    if constexpr (std::is_same_v<T, float>) {
      params.emplace(name, t);
    } else {
      params.emplace(name, t.template cast<T>());
    }
  }
  return Predictor(model_config_from_json(ckpt.meta.at("model")), std::move(params));
}

template <typename T>
LossParts<T> compute_loss(const PredictionBundle<T> & bundle, const Tensor<float> & targets,
                          const ModelConfig & config)
{
  if (!bundle.future.mu.defined()) {
    throw std::invalid_argument("compute_loss needs a training-mode bundle");
  }
  Tensor<T> y;
  if constexpr (std::is_same_v<T, float>) {
    y = targets;
  } else {
    y = targets.cast<T>();
  }
  const Var<T> bce = ad::weighted_bce_with_logits(bundle.logits, y, static_cast<T>(config.pos_weight));
  const Var<T> kl = config.kl_direction == KlDirection::kFutureToPresent
                      ? ad::kl_divergence(bundle.future, bundle.present)
                      : ad::kl_divergence(bundle.present, bundle.future);
  LossParts<T> out;
  out.total = ad::add(ad::scale(bce, static_cast<T>(config.lambda_bce)), ad::scale(kl, static_cast<T>(config.lambda_kl)));
  out.bce = bce.value()[0];
  out.kl = kl.value()[0];
  return out;
}

template class Predictor<float>;
template class Predictor<double>;
template LossParts<float> compute_loss(const PredictionBundle<float> &, const Tensor<float> &, const ModelConfig &);
template LossParts<double> compute_loss(const PredictionBundle<double> &, const Tensor<float> &, const ModelConfig &);

// ---------------------------------------------------------------------------
// training and inference

namespace
{

struct SampleResult
{
  std::vector<Tensor<float>> grads;
  double total = 0.0;
  double bce = 0.0;
  double kl = 0.0;
};

Tensor<float> normal_noise(int dim, std::initializer_list<std::uint64_t> key)
{
  std::seed_seq seq(key.begin(), key.end());
  std::mt19937_64 rng(seq);
  std::normal_distribution<float> n(0.0F, 1.0F);
  Tensor<float> t({1, dim});
  for (float & v : t.values()) {
    v = n(rng);
  }
  return t;
}

SampleResult run_sample(const Predictor<float> & model, const SequenceSample & s, const Tensor<float> & noise)
{
  const auto bound = model.bind(true);
  const auto bundle = model.forward(bound, s, &noise);
  const auto loss = compute_loss(bundle, s.targets, model.config());
  ad::backward(loss.total);
  SampleResult r;
  r.total = loss.total.value()[0];
  r.bce = loss.bce;
  r.kl = loss.kl;
  for (const auto & [name, v] : bound) {
    r.grads.push_back(v.grad().empty() ? Tensor<float>(v.shape()) : v.grad());
  }
  return r;
}

}  // namespace

TrainResult train(const std::vector<SequenceSample> & data, const ModelConfig & config, const TrainConfig & tc,
                  const std::function<void(const EpochLog &)> & on_epoch)
{
  if (data.empty()) {
    throw std::invalid_argument("train: empty dataset");
  }
  if (tc.epochs < 1 || tc.batch_size < 1) {
    throw std::invalid_argument("train: epochs and batch_size must be >= 1");
  }
  for (const auto & s : data) {
    check_sample(config, s, true);
  }
  TrainResult result{Predictor<float>(config, tc.seed), {}};
  Predictor<float> & model = result.model;
  std::vector<Tensor<float> *> params;
  for (auto & [_, t] : model.parameters()) {
    params.push_back(&t);
  }
  ad::AdamState<float> adam;
  ad::AdamConfig adam_cfg;
  adam_cfg.lr = config.lr;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(tc.seed ^ 0x9E3779B97F4A7C15ULL);
  const int workers = std::max(1, tc.workers);

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLog log;
    log.epoch = epoch;
    for (std::size_t first = 0; first < order.size(); first += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t count = std::min(static_cast<std::size_t>(tc.batch_size), order.size() - first);
      std::vector<SampleResult> results(count);
      parallel_for(count, workers, [&](std::size_t j) {
        const std::size_t idx = order[first + j];
        const auto noise = normal_noise(config.latent_dim, {tc.seed, static_cast<std::uint64_t>(epoch), idx});
        results[j] = run_sample(model, data[idx], noise);
      });
      std::vector<Tensor<float>> grads = results[0].grads;
      for (std::size_t j = 1; j < count; ++j) {
        for (std::size_t k = 0; k < grads.size(); ++k) {
          for (std::size_t i = 0; i < grads[k].numel(); ++i) {
            grads[k][i] += results[j].grads[k][i];
          }
        }
      }
      const float inv = 1.0F / static_cast<float>(count);
      for (auto & g : grads) {
        for (float & v : g.values()) {
          v *= inv;
        }
      }
      ad::adam_step(params, grads, adam, adam_cfg);
      for (const auto & r : results) {
        log.total += r.total;
        log.bce += r.bce;
        log.kl += r.kl;
      }
    }
    const double n = static_cast<double>(data.size());
    log.total /= n;
    log.bce /= n;
    log.kl /= n;
    log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(log);
    if (on_epoch) {
      on_epoch(log);
    }
  }
  return result;
}

std::string epoch_log_csv(const std::vector<EpochLog> & log)
{
  std::ostringstream os;
  os << "epoch,total,bce,kl\n";
  for (const auto & e : log) {
    os << e.epoch << ',' << std::setprecision(9) << e.total << ',' << e.bce << ',' << e.kl << '\n';
  }
  return os.str();
}

std::string epoch_timing_csv(const std::vector<EpochLog> & log)
{
  std::ostringstream os;
  os << "epoch,wall_seconds\n" << std::fixed << std::setprecision(3);
  for (const auto & e : log) {
    os << e.epoch << ',' << e.wall_seconds << '\n';
  }
  return os.str();
}

Inference infer(const Predictor<float> & model, const SequenceSample & sample, int samples, std::uint64_t seed)
{
  const ModelConfig & c = model.config();
  check_sample(c, sample, false);
  const auto p = model.bind(false);
  const Var<float> h = model.temporal_fuse(p, model.encode_inputs(p, sample));
  const auto present = model.present_distribution(p, h);
  auto run = [&](const Var<float> & z) {
    const Var<float> probs = ad::sigmoid(model.decode_frames(p, model.unroll_future(p, h, z)));
    return probs.value().reshaped({c.output_frames(), c.grid_side, c.grid_side});
  };
  Inference out;
  out.probabilities = run(present.mu);
  for (int k = 0; k < samples; ++k) {
    const auto noise = normal_noise(c.latent_dim, {seed, static_cast<std::uint64_t>(k)});
    out.samples.push_back(run(ad::sample(present, noise)));
  }
  return out;
}

}  // namespace gridcast
