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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gridcast/commands.hpp"
#include "gridcast/grd1.hpp"
#include "gridcast/metrics.hpp"

namespace py = pybind11;
using namespace gridcast;

namespace
{

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

std::span<const float> view(const FloatArray & a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

void require_same_size(const FloatArray & pred, const FloatArray & gt)
{
  if (pred.size() != gt.size()) {
    throw std::invalid_argument("prediction has " + std::to_string(pred.size()) + " cells, ground truth " +
                                std::to_string(gt.size()));
  }
}

RunConfig parse_config(const std::string & text)
{
  return text.empty() ? RunConfig{} : run_config_from_json(nlohmann::json::parse(text));
}

py::array_t<float> load_grd(const std::filesystem::path & path)
{
  const GrdTensor t = load_grd1(path);
  std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
  py::array_t<float> out(shape);
  float * dst = out.mutable_data();
  for (std::size_t i = 0; i < t.element_count(); ++i) {
    dst[i] = t.at(i);
  }
  return out;
}

void save_grd(const std::filesystem::path & path, const FloatArray & a)
{
  if (a.ndim() != 4) {
    throw std::invalid_argument("grid tensors are 4-d (T, C, H, W)");
  }
  std::array<std::uint32_t, 4> dims{};
  for (int k = 0; k < 4; ++k) {
    dims[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(a.shape(k));
  }
  const auto v = view(a);
  save_grd1(path, GrdTensor::make_f32(dims, {v.begin(), v.end()}));
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Occupancy grid forecasting: data generation, training, evaluation and rendering.";
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  m.def("load_grd", &load_grd, py::arg("path"), "Read a grid tensor as a float32 (T, C, H, W) array.");
  m.def("save_grd", &save_grd, py::arg("path"), py::arg("array"));

  m.def(
      "soft_iou",
      [](const FloatArray & pred, const FloatArray & gt) {
        require_same_size(pred, gt);
        return soft_iou(view(pred), view(gt));
      },
      py::arg("pred"), py::arg("gt"));
  m.def(
      "iou",
      [](const FloatArray & pred, const FloatArray & gt, double threshold) {
        require_same_size(pred, gt);
        return iou_binary(view(pred), view(gt), threshold);
      },
      py::arg("pred"), py::arg("gt"), py::arg("threshold") = 0.5);
  m.def(
      "auc_pr",
      [](const FloatArray & pred, const FloatArray & gt) {
        require_same_size(pred, gt);
        return auc_pr(view(pred), view(gt));
      },
      py::arg("pred"), py::arg("gt"), "None when the ground truth has no positive cell.");

  m.def(
      "_gen_data",
      [](const std::filesystem::path & out, std::uint64_t seed, const std::string & config, int workers) {
        GenDataOptions o;
        o.seed = seed;
        o.config = parse_config(config).dataset;
        o.out = out;
        o.workers = workers;
        py::gil_scoped_release release;
        return manifest_to_json(cmd_gen_data(o)).dump();
      },
      py::arg("out"), py::arg("seed"), py::arg("config"), py::arg("workers"));

  m.def(
      "_train",
      [](const std::filesystem::path & data, const std::filesystem::path & out, const std::string & config,
         const std::string & ablation) {
        TrainOptions o;
        o.data = data;
        o.out = out;
        o.config = parse_config(config);
        o.ablation = ablation;
        py::gil_scoped_release release;
        const TrainResult r = cmd_train(o);
        nlohmann::json log = nlohmann::json::array();
        for (const auto & e : r.log) {
          log.push_back({{"epoch", e.epoch}, {"total", e.total}, {"bce", e.bce}, {"kl", e.kl}});
        }
        return log.dump();
      },
      py::arg("data"), py::arg("out"), py::arg("config"), py::arg("ablation"));

  m.def(
      "_evaluate",
      [](const std::filesystem::path & checkpoint, const std::filesystem::path & data, const std::filesystem::path & out,
         bool include_baselines, bool noisy_semantics, int workers) {
        EvalCommandOptions o;
        o.checkpoint = checkpoint;
        o.data = data;
        o.out = out;
        o.include_baselines = include_baselines;
        o.noisy_semantics = noisy_semantics;
        o.workers = workers;
        py::gil_scoped_release release;
        return eval_report_json(cmd_eval(o)).dump();
      },
      py::arg("checkpoint"), py::arg("data"), py::arg("out"), py::arg("include_baselines"),
      py::arg("noisy_semantics"), py::arg("workers"));

  m.def(
      "render",
      [](const std::filesystem::path & input, const std::filesystem::path & out, int scale) {
        return cmd_render(input, out, scale);
      },
      py::arg("input"), py::arg("out"), py::arg("scale") = 4, "Render a grid, prediction or retention file.");

  m.def("ablation_names", &ablation_names);
}
