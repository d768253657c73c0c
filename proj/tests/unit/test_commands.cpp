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

#include <cstdlib>
#include <fstream>

#include "../support/temp_dir.hpp"
#include "gridcast/commands.hpp"
#include "gridcast/grd1.hpp"

using namespace gridcast;
using gridcast::testing::read_bytes;
using gridcast::testing::TempDir;
using gridcast::testing::tree_bytes;

namespace
{

RunConfig quick_config()
{
  RunConfig c;
  c.dataset.n_train = 2;
  c.dataset.n_val = 1;
  c.model.base_channels = 2;
  c.model.latent_dim = 4;
  c.model.lstm_layers = 1;
  c.model.gru_layers = 1;
  c.model.lr = 1e-2;
  c.train.epochs = 1;
  c.train.batch_size = 2;
  return c;
}

std::filesystem::path make_data(const TempDir & dir, const RunConfig & c, const std::string & name = "data")
{
  GenDataOptions g;
  g.seed = 42;
  g.config = c.dataset;
  g.out = dir / name;
  cmd_gen_data(g);
  return g.out;
}

}  // namespace

TEST_CASE("workers come from the flag, then the environment")
{
  ::unsetenv("GRIDCAST_WORKERS");
  CHECK(resolve_workers(std::nullopt) == 1);
  CHECK(resolve_workers(3) == 3);
  ::setenv("GRIDCAST_WORKERS", "5", 1);
  CHECK(resolve_workers(std::nullopt) == 5);
  CHECK(resolve_workers(2) == 2);
  ::setenv("GRIDCAST_WORKERS", "many", 1);
  CHECK_THROWS_AS(resolve_workers(std::nullopt), UsageError);
  ::unsetenv("GRIDCAST_WORKERS");
  CHECK_THROWS_AS(resolve_workers(0), UsageError);
}

TEST_CASE("unknown ablation is a usage error listing valid names")
{
  for (const auto & name : ablation_names()) {
    CHECK_NOTHROW(require_ablation(name));
  }
  try {
    require_ablation("dogm+radar");
    FAIL("expected UsageError");
  } catch (const UsageError & e) {
    const std::string msg = e.what();
    for (const char * n : {"dogm+radar", "full", "dogm", "dogm+map", "dogm+sem"}) {
      CHECK(msg.find(n) != std::string::npos);
    }
  }
}

TEST_CASE("run config sections")
{
  const RunConfig c = quick_config();
  const auto j = run_config_to_json(c);
  CHECK(run_config_to_json(run_config_from_json(j)) == j);
  CHECK_THROWS_AS(run_config_from_json({{"optimizer", {}}}), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json({{"train", {{"epochs", 0}}}}), std::invalid_argument);
  const RunConfig partial = run_config_from_json({{"train", {{"epochs", 3}}}});
  CHECK(partial.train.epochs == 3);
  CHECK(partial.model.base_channels == ModelConfig{}.base_channels);

  TempDir dir("gc_cfg");
  CHECK_THROWS_AS(load_run_config(dir / "missing.json"), std::runtime_error);
  std::ofstream(dir / "bad.json") << "{\"model\": {\"widht\": 3}}";
  CHECK_THROWS_AS(load_run_config(dir / "bad.json"), std::runtime_error);
}

TEST_CASE("ablation flags map to model inputs")
{
  const ModelConfig base;
  CHECK_FALSE(apply_ablation(base, "dogm").use_map);
  CHECK_FALSE(apply_ablation(base, "dogm").use_semantics);
  CHECK_FALSE(apply_ablation(base, "dogm+sem").use_map);
  CHECK(apply_ablation(base, "dogm+sem").use_semantics);
  CHECK(apply_ablation(base, "dogm+map").use_map);
  CHECK_FALSE(apply_ablation(base, "dogm+map").use_semantics);
  CHECK(apply_ablation(base, "full").use_map);
  CHECK(apply_ablation(base, "full").use_semantics);
}

TEST_CASE("train and eval are byte identical on rerun")
{
  TempDir dir("gc_cmd");
  const RunConfig c = quick_config();
  const auto data = make_data(dir, c);

  for (const char * run : {"t1", "t2"}) {
    TrainOptions t;
    t.data = data;
    t.config = c;
    t.out = dir / run;
    cmd_train(t);
  }
  CHECK(read_bytes(dir / "t1/model.ckpt") == read_bytes(dir / "t2/model.ckpt"));
  CHECK(read_bytes(dir / "t1/loss.csv") == read_bytes(dir / "t2/loss.csv"));
  CHECK(read_bytes(dir / "t1/loss.csv").rfind("epoch,total,bce,kl\n", 0) == 0);
  CHECK(std::filesystem::exists(dir / "t1/timing.csv"));

  for (const char * run : {"e1", "e2"}) {
    EvalCommandOptions e;
    e.checkpoint = dir / "t1/model.ckpt";
    e.data = data;
    e.out = dir / run;
    e.include_baselines = true;
    cmd_eval(e);
  }
  CHECK(tree_bytes(dir / "e1") == tree_bytes(dir / "e2"));
  const auto report = nlohmann::json::parse(read_bytes(dir / "e1/report.json"));
  CHECK(report.at("systems").size() == 3);
  CHECK(report.at("model").at("base_channels") == 2);
}

TEST_CASE("eval refuses a checkpoint of another geometry")
{
  TempDir dir("gc_geom");
  RunConfig c = quick_config();
  const auto data = make_data(dir, c);
  TrainOptions t;
  t.data = data;
  t.config = c;
  t.out = dir / "train";
  cmd_train(t);

  c.dataset.grid_side = 32;
  const auto other = make_data(dir, c, "other");
  EvalCommandOptions e;
  e.checkpoint = dir / "train/model.ckpt";
  e.data = other;
  e.out = dir / "eval";
  try {
    cmd_eval(e);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument & ex) {
    const std::string msg = ex.what();
    CHECK(msg.find("model grid 64") != std::string::npos);
    CHECK(msg.find("dataset grid 32") != std::string::npos);
  }
}

TEST_CASE("train validates the manifest before computing")
{
  TempDir dir("gc_validate");
  const RunConfig c = quick_config();
  const auto data = make_data(dir, c);
  const Manifest m = load_manifest(data);
  std::filesystem::remove(data / m.val[0].dir / "map.grd");
  TrainOptions t;
  t.data = data;
  t.config = c;
  t.out = dir / "train";
  CHECK_THROWS_AS(cmd_train(t), FormatError);
  CHECK_FALSE(std::filesystem::exists(dir / "train"));
}

TEST_CASE("ablate writes four rows and one file per ablation and seed")
{
  TempDir dir("gc_ablate");
  const RunConfig c = quick_config();
  AblateOptions a;
  a.data = make_data(dir, c);
  a.config = c;
  a.seeds = {1, 2};
  a.out = dir / "ablate";
  const AblationSummary s = cmd_ablate(a);
  REQUIRE(s.rows.size() == 4);
  for (const auto & r : s.rows) {
    CHECK(r.iou.size() == 2);
    CHECK(r.auc.size() == 2);
  }

  const std::string csv = read_bytes(a.out / "summary.csv");
  CHECK(csv.rfind("configuration,iou,auc\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  for (const auto & name : ablation_names()) {
    CHECK(csv.find("\n" + name + ",") != std::string::npos);
  }
  int files = 0;
  for (const auto & e : std::filesystem::directory_iterator(a.out / "per_seed")) {
    files += e.is_regular_file();
  }
  CHECK(files == 4 * 2);
  CHECK(std::filesystem::exists(a.out / "per_seed" / "dogm+sem_seed2.json"));
  const auto summary = nlohmann::json::parse(read_bytes(a.out / "summary.json"));
  CHECK(summary.at("rows").size() == 4);
  CHECK(summary.at("rows")[0].at("per_seed").size() == 2);
}

TEST_CASE("render of an unknown file type is a usage error")
{
  TempDir dir("gc_cmd_render");
  std::ofstream(dir / "x.bin") << "x";
  CHECK_THROWS_AS(cmd_render(dir / "x.bin", dir / "out"), UsageError);
  CHECK_THROWS_AS(cmd_render(dir / "x.bin", dir / "out", 0), UsageError);
}
