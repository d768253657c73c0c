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

#include "gridcast/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "gridcast/grd1.hpp"
#include "gridcast/parallel.hpp"

namespace gridcast
{

namespace
{

double future_mean(const std::vector<double> & v)
{
  if (v.size() < 2) {
    return 0.0;
  }
  double s = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    s += v[k];
  }
  return s / static_cast<double>(v.size() - 1);
}

struct SequenceScores
{
  std::vector<double> soft_iou;
  std::vector<double> iou;
  std::vector<std::optional<double>> auc;
  std::vector<RetentionStep> retention;
};

SequenceScores score(const std::vector<VehicleGrid> & preds, const LoadedSequence & seq,
                     const std::vector<int> & frames)
{
  SequenceScores s;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    s.soft_iou.push_back(soft_iou(preds[k], seq.targets[k]));
    s.iou.push_back(iou_binary(preds[k], seq.targets[k]));
    s.auc.push_back(auc_pr(preds[k], seq.targets[k]));
  }
  s.retention = retention(preds, seq.scenario, seq.perceived, frames);
  return s;
}

std::vector<OrientedBox> annotated_boxes(const Scenario & sc, int frame)
{
  std::vector<OrientedBox> boxes{sc.ego.box_at(frame)};
  for (const auto & v : sc.vehicles) {
    boxes.push_back(v.box_at(frame));
  }
  return boxes;
}

}  // namespace

double SystemScores::mean_soft_iou() const { return future_mean(soft_iou); }
double SystemScores::mean_iou() const { return future_mean(iou); }
double SystemScores::mean_auc() const { return future_mean(auc); }

std::vector<VehicleGrid> model_grids(const Predictor<float> & model, const LoadedSequence & seq)
{
  const Inference inf = infer(model, seq.sample);
  const int steps = model.config().output_frames();
  const std::size_t plane = seq.spec.cell_count();
  std::vector<VehicleGrid> out;
  for (int k = 0; k < steps; ++k) {
    VehicleGrid g(seq.spec);
    const float * src = inf.probabilities.data() + static_cast<std::size_t>(k) * plane;
    g.occupancy.assign(src, src + plane);
    out.push_back(std::move(g));
  }
  return out;
}

SequencePredictions predict_sequence(const Predictor<float> & model, const LoadedSequence & seq,
                                     bool include_baselines, const ConstVelocityParams & cv)
{
  SequencePredictions out;
  out.model = model_grids(model, seq);
  if (include_baselines) {
    const int steps = static_cast<int>(out.model.size()) - 1;
    out.persistence = baseline_persistence(seq.dogm, steps);
    out.const_velocity = baseline_const_velocity(seq.dogm, steps, cv);
  }
  return out;
}

EvalResult evaluate(const Predictor<float> & model, const std::filesystem::path & root, const Manifest & manifest,
                    const EvalOptions & options)
{
  check_geometry(model.config(), manifest.config);
  return evaluate([&model](const LoadedSequence & seq) { return model_grids(model, seq); }, root, manifest, options);
}

EvalResult evaluate(const PredictFn & predict, const std::filesystem::path & root, const Manifest & manifest,
                    const EvalOptions & options)
{
  const auto & entries = manifest.val;
  const std::vector<int> frames = manifest.config.target_frames();
  const int steps = manifest.config.future_steps + 1;
  ConstVelocityParams cv;
  cv.frames_per_step = manifest.config.frames_per_step;

  std::vector<std::map<std::string, SequenceScores>> per_seq(entries.size());
  const int workers = std::max(1, options.workers);
  if (!options.predictions_dir.empty()) {
    std::filesystem::create_directories(options.predictions_dir);
  }
  parallel_for(entries.size(), workers, [&](std::size_t i) {
    LoadOptions lo;
    lo.noisy_semantics = options.noisy_semantics;
    const LoadedSequence seq = load_sequence(root, manifest, entries[i], lo);
    SequencePredictions p;
    p.model = predict(seq);
    if (p.model.size() != static_cast<std::size_t>(steps)) {
      throw std::invalid_argument("predictor returned " + std::to_string(p.model.size()) + " grids, expected " +
                                  std::to_string(steps));
    }
    if (options.include_baselines) {
      p.persistence = baseline_persistence(seq.dogm, steps - 1);
      p.const_velocity = baseline_const_velocity(seq.dogm, steps - 1, cv);
    }
    if (!options.predictions_dir.empty()) {
      std::vector<float> values;
      for (const auto & g : p.model) {
        values.insert(values.end(), g.occupancy.begin(), g.occupancy.end());
      }
      const auto side = static_cast<std::uint32_t>(seq.spec.cells_per_side());
      save_grd1(options.predictions_dir / (entries[i].name + ".grd"),
                GrdTensor::make_f32({static_cast<std::uint32_t>(steps), 1U, side, side}, std::move(values)));
    }
    per_seq[i]["model"] = score(p.model, seq, frames);
    if (options.include_baselines) {
      std::vector<VehicleGrid> pers_clean;
      std::vector<VehicleGrid> vel_clean;
      for (int k = 0; k < steps; ++k) {
        const auto boxes = annotated_boxes(seq.scenario, frames[static_cast<std::size_t>(k)]);
        pers_clean.push_back(ogm_cleanup(p.persistence[static_cast<std::size_t>(k)], seq.map, boxes));
        vel_clean.push_back(ogm_cleanup(p.const_velocity[static_cast<std::size_t>(k)], seq.map, boxes));
      }
      per_seq[i]["persistence"] = score(pers_clean, seq, frames);
      per_seq[i]["const_velocity"] = score(vel_clean, seq, frames);
    }
  });

  EvalResult r;
  r.sequences = static_cast<int>(entries.size());
  r.step_seconds = manifest.config.frames_per_step * 0.1;
  std::vector<std::string> names{"model"};
  if (options.include_baselines) {
    names.insert(names.end(), {"persistence", "const_velocity"});
  }
  for (const auto & name : names) {
    SystemScores s;
    s.soft_iou.assign(static_cast<std::size_t>(steps), 0.0);
    s.iou.assign(static_cast<std::size_t>(steps), 0.0);
    s.auc.assign(static_cast<std::size_t>(steps), 0.0);
    s.auc_excluded.assign(static_cast<std::size_t>(steps), 0);
    s.retention.assign(static_cast<std::size_t>(steps), {});
    std::vector<int> auc_count(static_cast<std::size_t>(steps), 0);
    for (const auto & seq : per_seq) {
      const SequenceScores & sc = seq.at(name);
      for (std::size_t k = 0; k < static_cast<std::size_t>(steps); ++k) {
        s.soft_iou[k] += sc.soft_iou[k];
        s.iou[k] += sc.iou[k];
        if (sc.auc[k]) {
          s.auc[k] += *sc.auc[k];
          ++auc_count[k];
        } else {
          ++s.auc_excluded[k];
        }
        s.retention[k].stat.retained += sc.retention[k].stat.retained;
        s.retention[k].stat.total += sc.retention[k].stat.total;
        s.retention[k].dyn.retained += sc.retention[k].dyn.retained;
        s.retention[k].dyn.total += sc.retention[k].dyn.total;
        s.retention[k].excluded += sc.retention[k].excluded;
      }
    }
    const double n = std::max<double>(1.0, static_cast<double>(per_seq.size()));
    for (std::size_t k = 0; k < static_cast<std::size_t>(steps); ++k) {
      s.soft_iou[k] /= n;
      s.iou[k] /= n;
      s.auc[k] = auc_count[k] > 0 ? s.auc[k] / auc_count[k] : 0.0;
    }
    r.systems[name] = std::move(s);
  }
  return r;
}

namespace
{

nlohmann::json step_json(const SystemScores & s, std::size_t k, double step_seconds)
{
  return {{"step", k},
          {"time_s", static_cast<double>(k) * step_seconds},
          {"soft_iou", s.soft_iou[k]},
          {"iou", s.iou[k]},
          {"auc", s.auc[k]},
          {"auc_excluded", s.auc_excluded[k]}};
}

nlohmann::json retention_json(const RetentionCounts & c, std::size_t k, double step_seconds)
{
  return {{"step", k},
          {"time_s", static_cast<double>(k) * step_seconds},
          {"retained", c.retained},
          {"total", c.total},
          {"percent", 100.0 * c.fraction()}};
}

}  // namespace

nlohmann::json eval_report_json(const EvalResult & r)
{
  nlohmann::json systems = nlohmann::json::object();
  for (const auto & [name, s] : r.systems) {
    nlohmann::json per_step = nlohmann::json::array();
    nlohmann::json stat = nlohmann::json::array();
    nlohmann::json dyn = nlohmann::json::array();
    nlohmann::json excluded = nlohmann::json::array();
    for (std::size_t k = 1; k < s.soft_iou.size(); ++k) {
      per_step.push_back(step_json(s, k, r.step_seconds));
      stat.push_back(retention_json(s.retention[k].stat, k, r.step_seconds));
      dyn.push_back(retention_json(s.retention[k].dyn, k, r.step_seconds));
      excluded.push_back({{"step", k}, {"time_s", static_cast<double>(k) * r.step_seconds},
                          {"excluded", s.retention[k].excluded}});
    }
    systems[name] = {{"present", step_json(s, 0, r.step_seconds)},
                     {"per_step", per_step},
                     {"mean", {{"soft_iou", s.mean_soft_iou()}, {"iou", s.mean_iou()}, {"auc", s.mean_auc()}}},
                     {"retention", {{"static", stat}, {"dynamic", dyn}, {"excluded", excluded}}}};
  }
  return {{"sequences", r.sequences},
          {"horizon_s", static_cast<double>(r.systems.begin()->second.soft_iou.size() - 1) * r.step_seconds},
          {"systems", systems}};
}

std::string retention_csv(const EvalResult & r)
{
  std::ostringstream os;
  os << "system,time_s,static_retained,static_total,static_percent,dynamic_retained,dynamic_total,"
        "dynamic_percent,excluded\n";
  char buf[256];
  for (const auto & [name, s] : r.systems) {
    for (std::size_t k = 1; k < s.retention.size(); ++k) {
      const auto & st = s.retention[k];
      std::snprintf(buf, sizeof(buf), "%s,%.6f,%d,%d,%.6f,%d,%d,%.6f,%d\n", name.c_str(),
                    static_cast<double>(k) * r.step_seconds, st.stat.retained, st.stat.total,
                    100.0 * st.stat.fraction(), st.dyn.retained, st.dyn.total, 100.0 * st.dyn.fraction(),
                    st.excluded);
      os << buf;
    }
  }
  return os.str();
}

namespace
{

void dump_value(std::ostringstream & os, const nlohmann::json & j, int indent, int depth)
{
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (const auto & [key, value] : j.items()) {
      if (!first) {
        os << ",\n";
      }
      first = false;
      os << pad << nlohmann::json(key).dump() << ": ";
      dump_value(os, value, indent, depth + 1);
    }
    os << "\n" << close_pad << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) {
        os << ",\n";
      }
      os << pad;
      dump_value(os, j[i], indent, depth + 1);
    }
    os << "\n" << close_pad << "]";
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", std::isfinite(v) ? v : 0.0);
    // avoid "-0.000000"
    os << (std::string(buf) == "-0.000000" ? "0.000000" : buf);
  } else {
    os << j.dump();
  }
}

}  // namespace

std::string dump_fixed(const nlohmann::json & j, int indent)
{
  std::ostringstream os;
  dump_value(os, j, indent, 0);
  os << "\n";
  return os.str();
}

}  // namespace gridcast
