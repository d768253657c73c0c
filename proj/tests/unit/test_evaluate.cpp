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

#include <doctest.h>

#include <regex>

#include "../support/temp_dir.hpp"
#include "gridcast/evaluate.hpp"
#include "gridcast/grd1.hpp"

using namespace gridcast;
using gridcast::testing::TempDir;

namespace
{

struct Fixture
{
  TempDir dir{"gc_eval"};
  Manifest manifest;

  Fixture()
  {
    DatasetConfig c;
    c.n_train = 1;
    c.n_val = 3;
    manifest = generate_dataset(dir.path(), 21, c);
  }
};

ModelConfig small_model()
{
  ModelConfig m;
  m.base_channels = 2;
  m.latent_dim = 4;
  m.lstm_layers = 1;
  m.gru_layers = 1;
  return m;
}

std::vector<VehicleGrid> ground_truth(const LoadedSequence & seq) { return seq.targets; }

}  // namespace

TEST_CASE("ground truth scored as a prediction is perfect")
{
  Fixture f;
  EvalOptions o;
  o.include_baselines = true;
  const EvalResult r = evaluate(ground_truth, f.dir.path(), f.manifest, o);
  CHECK(r.sequences == 3);
  CHECK(r.step_seconds == doctest::Approx(0.5));
  const SystemScores & s = r.systems.at("model");
  REQUIRE(s.soft_iou.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(s.soft_iou[k] == doctest::Approx(1.0));
    CHECK(s.iou[k] == doctest::Approx(1.0));
    CHECK(s.auc[k] == doctest::Approx(1.0));
    CHECK(s.retention[k].stat.retained == s.retention[k].stat.total);
    CHECK(s.retention[k].dyn.retained == s.retention[k].dyn.total);
  }
  CHECK(s.mean_soft_iou() == doctest::Approx(1.0));
  int perceived = 0;
  for (const auto & e : f.manifest.val) {
    perceived += static_cast<int>(e.perceived.size());
  }
  CHECK(s.retention[1].stat.total + s.retention[1].dyn.total + s.retention[1].excluded == perceived);

  // baselines are scored but cannot beat ground truth
  for (const char * name : {"persistence", "const_velocity"}) {
    const SystemScores & b = r.systems.at(name);
    CHECK(b.mean_soft_iou() < s.mean_soft_iou());
    CHECK(b.mean_soft_iou() >= 0.0);
  }
}

TEST_CASE("baseline sections exist only when requested")
{
  Fixture f;
  const EvalResult plain = evaluate(ground_truth, f.dir.path(), f.manifest);
  CHECK(plain.systems.size() == 1);
  CHECK(eval_report_json(plain).at("systems").size() == 1);

  EvalOptions o;
  o.include_baselines = true;
  const nlohmann::json j = eval_report_json(evaluate(ground_truth, f.dir.path(), f.manifest, o));
  CHECK(j.at("systems").contains("persistence"));
  CHECK(j.at("systems").contains("const_velocity"));
}

TEST_CASE("report schema")
{
  Fixture f;
  const nlohmann::json j = eval_report_json(evaluate(ground_truth, f.dir.path(), f.manifest));
  CHECK(j.at("horizon_s").get<double>() == doctest::Approx(2.5));
  const auto & m = j.at("systems").at("model");
  for (const char * key : {"soft_iou", "iou", "auc"}) {
    CHECK(m.at("mean").contains(key));
  }
  REQUIRE(m.at("per_step").size() == 5);
  CHECK(m.at("per_step")[0].at("time_s").get<double>() == doctest::Approx(0.5));
  CHECK(m.at("per_step")[4].at("time_s").get<double>() == doctest::Approx(2.5));
  CHECK(m.at("present").at("step") == 0);
  CHECK(m.at("retention").at("static").size() == 5);
  CHECK(m.at("retention").at("dynamic").size() == 5);
  CHECK(m.at("retention").at("excluded").size() == 5);
  CHECK(m.at("retention").at("dynamic")[4].contains("percent"));
}

TEST_CASE("retention csv has one row per system and future step")
{
  Fixture f;
  EvalOptions o;
  o.include_baselines = true;
  const std::string csv = retention_csv(evaluate(ground_truth, f.dir.path(), f.manifest, o));
  CHECK(csv.rfind("system,time_s,static_retained,static_total,static_percent,dynamic_retained,dynamic_total,"
                  "dynamic_percent,excluded\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 5);
  CHECK(csv.find("model,2.500000,") != std::string::npos);
}

TEST_CASE("fixed float formatting")
{
  const nlohmann::json j = {{"b", 0.1}, {"a", 2}, {"c", {{"y", -1e-9}, {"x", 1.0 / 3.0}}}, {"d", {1.5, true}}};
  const std::string s = dump_fixed(j);
  CHECK(s.find("\"a\": 2,") != std::string::npos);
  CHECK(s.find("\"b\": 0.100000") != std::string::npos);
  CHECK(s.find("\"x\": 0.333333") != std::string::npos);
  CHECK(s.find("\"y\": 0.000000") != std::string::npos);
  CHECK(s.find("1.500000") != std::string::npos);
  CHECK(s.find("true") != std::string::npos);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("\"x\"") < s.find("\"y\""));
  // every float has exactly six decimals
  const std::regex number(R"(-?\d+\.(\d+))");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), number); it != std::sregex_iterator(); ++it) {
    CHECK((*it)[1].length() == 6);
  }
  CHECK(nlohmann::json::parse(s).at("c").at("x").get<double>() == doctest::Approx(0.333333));
}

TEST_CASE("model evaluation is deterministic and worker independent")
{
  Fixture f;
  const Predictor<float> model(small_model(), 5);
  EvalOptions o;
  o.include_baselines = true;
  const std::string a = dump_fixed(eval_report_json(evaluate(model, f.dir.path(), f.manifest, o)));
  const std::string b = dump_fixed(eval_report_json(evaluate(model, f.dir.path(), f.manifest, o)));
  o.workers = 3;
  const std::string c = dump_fixed(eval_report_json(evaluate(model, f.dir.path(), f.manifest, o)));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("model evaluation rejects a geometry mismatch")
{
  Fixture f;
  ModelConfig m = small_model();
  m.grid_side = 32;
  const Predictor<float> model(m, 5);
  try {
    evaluate(model, f.dir.path(), f.manifest);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument & e) {
    const std::string msg = e.what();
    CHECK(msg.find("model grid 32") != std::string::npos);
    CHECK(msg.find("dataset grid 64") != std::string::npos);
  }
}

TEST_CASE("predictor errors propagate from worker threads")
{
  Fixture f;
  EvalOptions o;
  o.workers = 2;
  auto short_predictor = [](const LoadedSequence & seq) {
    return std::vector<VehicleGrid>(seq.targets.begin(), seq.targets.begin() + 2);
  };
  CHECK_THROWS_AS(evaluate(short_predictor, f.dir.path(), f.manifest, o), std::invalid_argument);
}

TEST_CASE("predictions directory receives one grid per sequence")
{
  Fixture f;
  EvalOptions o;
  o.predictions_dir = f.dir / "pred";
  evaluate(ground_truth, f.dir.path(), f.manifest, o);
  for (const auto & e : f.manifest.val) {
    const GrdTensor t = load_grd1(o.predictions_dir / (e.name + ".grd"));
    CHECK(t.dims == std::array<std::uint32_t, 4>{6, 1, 64, 64});
  }
}
