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

// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 0
// only when all of them pass. The desk-scale criteria generate the 200/50
// dataset and train every ablation for each seed, which takes about an hour
// on one core.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "../support/criteria.hpp"
#include "../support/temp_dir.hpp"
#include "gridcast/commands.hpp"

using namespace gridcast;
namespace fs = std::filesystem;
namespace gt = gridcast::testing;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char * f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

class Report
{
public:
  void line(int id, bool pass, const std::string & what)
  {
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << what << std::endl;
    all_ &= pass;
  }
  bool all() const { return all_; }

private:
  bool all_ = true;
};

LogFn progress(bool verbose)
{
  if (!verbose) {
    return {};
  }
  return [](const std::string & m) { std::cerr << "  " << m << "\n"; };
}

std::vector<EpochLog> read_loss_csv(const fs::path & p)
{
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  std::vector<EpochLog> out;
  while (std::getline(is, line)) {
    EpochLog e;
    char comma = 0;
    std::istringstream ls(line);
    ls >> e.epoch >> comma >> e.total >> comma >> e.bce >> comma >> e.kl;
    if (ls) {
      out.push_back(e);
    }
  }
  return out;
}

double training_seconds(const fs::path & run)
{
  std::ifstream is(run / "timing.csv");
  std::string line;
  std::getline(is, line);
  double total = 0.0;
  while (std::getline(is, line)) {
    total += std::stod(line.substr(line.find(',') + 1));
  }
  return total;
}

AblationSummary summary_from_json(const fs::path & p)
{
  std::ifstream is(p);
  const auto j = nlohmann::json::parse(is);
  AblationSummary s;
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto & row : j.at("rows")) {
    AblationRow r;
    r.ablation = row.at("configuration").get<std::string>();
    for (const auto & ps : row.at("per_seed")) {
      r.iou.push_back(ps.at("iou").get<double>());
      r.auc.push_back(ps.at("auc").get<double>());
      r.soft_iou.push_back(ps.at("soft_iou").get<double>());
    }
    s.rows.push_back(std::move(r));
  }
  return s;
}

/// Every file of a run directory except wall-clock timings.
std::map<std::string, std::string> deterministic_files(const fs::path & dir)
{
  auto files = gt::tree_bytes(dir);
  files.erase("timing.csv");
  return files;
}

void gradients(Report & rep)
{
  const auto t0 = Clock::now();
  double op_err = 0.0;
  double pointwise_err = 0.0;
  bool ok = true;
  const auto cases = gt::operator_gradient_cases();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    for (const auto & c : cases) {
      const double e = c.error(rng);
      ok = ok && e < c.tolerance;
      double & worst = c.tolerance < 1e-3 ? pointwise_err : op_err;
      worst = std::max(worst, e);
    }
  }
  const double e2e = gt::end_to_end_gradient_error();
  const double secs = seconds_since(t0);
  ok = ok && e2e < 1e-3 && secs < 120.0;
  rep.line(1, ok,
           fmt("finite differences: operators %.2e (<1e-3), pointwise %.2e (<1e-5), end-to-end %.2e (<1e-3), "
               "%.1f s (<120 s)",
               op_err, pointwise_err, e2e, secs));
}

void metric_oracles(Report & rep)
{
  const auto r = gt::compare_metric_oracles(1000, 7);
  const bool ok = r.soft_iou < 1e-9 && r.iou < 1e-9 && r.auc < 1e-9 && r.definedness_mismatches == 0 && r.in_range;
  rep.line(2, ok,
           fmt("1000 random 16x16 instances: max |diff| soft-IoU %.1e, IoU %.1e, AUC %.1e (<1e-9), "
               "%d AUC definedness mismatches",
               r.soft_iou, r.iou, r.auc, r.definedness_mismatches));
}

void filter(Report & rep, const DatasetConfig & config)
{
  const auto sweep = gt::filter_normalization_sweep(50, 9000, config);
  const auto parked = gt::parked_vehicle_observation();
  const bool ok = sweep.scenarios == 50 && sweep.max_error < 1e-6 && parked.hit_cells > 0 && parked.min_p_static > 0.5;
  rep.line(3, ok,
           fmt("%d frames over %d scenarios, max normalization error %.1e (<1e-6); parked vehicle min p_static "
               "%.3f over %d observed cells (>0.5)",
               sweep.frames, sweep.scenarios, sweep.max_error, parked.min_p_static, parked.hit_cells));
}

void determinism(Report & rep, const RunConfig & desk, const fs::path & work)
{
  RunConfig c = desk;
  c.dataset.n_train = 4;
  c.dataset.n_val = 2;
  c.train.epochs = 2;
  c.train.batch_size = 2;
  const fs::path root = work / "determinism";
  fs::remove_all(root);

  for (const char * tag : {"a", "b"}) {
    GenDataOptions g;
    g.seed = 42;
    g.config = c.dataset;
    g.out = root / tag / "data";
    g.workers = tag[0] == 'a' ? 1 : 2;
    cmd_gen_data(g);
    TrainOptions t;
    t.data = g.out;
    t.config = c;
    t.out = root / tag / "train";
    cmd_train(t);
    EvalCommandOptions e;
    e.checkpoint = t.out / "model.ckpt";
    e.data = g.out;
    e.out = root / tag / "eval";
    e.include_baselines = true;
    e.workers = g.workers;
    cmd_eval(e);
  }
  const bool data = gt::tree_bytes(root / "a/data") == gt::tree_bytes(root / "b/data");
  const bool train = deterministic_files(root / "a/train") == deterministic_files(root / "b/train");
  const bool eval = gt::tree_bytes(root / "a/eval") == gt::tree_bytes(root / "b/eval");
  rep.line(8, data && train && eval,
           fmt("rerun with seed 42 (1 vs 2 workers): dataset %s, checkpoint and loss curve %s, report %s",
               data ? "identical" : "DIFFERS", train ? "identical" : "DIFFER", eval ? "identical" : "DIFFERS"));
}

void channel_invariance(Report & rep)
{
  const bool sem = gt::ablated_input_is_ignored("semantics", 5, 31);
  const bool map = gt::ablated_input_is_ignored("map", 5, 37);
  rep.line(9, sem && map,
           fmt("logits bit-identical under rewritten inputs: semantics disabled %s, map disabled %s",
               sem ? "yes" : "NO", map ? "yes" : "NO"));
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"GridCast acceptance run"};
  fs::path work = "acceptance_work";
  fs::path config_path;
  std::vector<std::uint64_t> seeds{42, 43, 44};
  bool reuse = false;
  bool verbose = false;
  std::optional<int> workers_flag;
  app.add_option("--work", work, "Working directory for datasets and runs");
  app.add_option("--config", config_path, "Desk-scale run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seeds, "Training seeds of the ablation")->expected(3);
  app.add_option("--workers", workers_flag);
  app.add_flag("--reuse", reuse, "Keep a finished dataset and ablation found in the working directory");
  app.add_flag("-v,--verbose", verbose);
  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig desk = load_run_config(config_path);
    const int workers = resolve_workers(workers_flag);
    const LogFn log = progress(verbose);
    fs::create_directories(work);
    Report rep;

    gradients(rep);
    metric_oracles(rep);
    filter(rep, desk.dataset);

    // desk-scale dataset and ablation; the full model with the first seed
    // serves the learning, robustness and KL criteria
    const fs::path data = work / "data";
    double gen_seconds = 0.0;
    bool have_data = false;
    if (reuse) {
      try {
        have_data = load_manifest(data).config_hash == config_hash(dataset_config_to_json(desk.dataset));
      } catch (const std::exception &) {
        have_data = false;
      }
    }
    if (!have_data) {
      const auto t0 = Clock::now();
      fs::remove_all(data);
      GenDataOptions g;
      g.seed = 42;
      g.config = desk.dataset;
      g.out = data;
      g.workers = workers;
      g.log = log;
      cmd_gen_data(g);
      gen_seconds = seconds_since(t0);
    }

    const fs::path ablate_dir = work / "ablate";
    AblationSummary summary;
    if (reuse && fs::exists(ablate_dir / "summary.json") &&
        summary_from_json(ablate_dir / "summary.json").seeds == seeds) {
      summary = summary_from_json(ablate_dir / "summary.json");
    } else {
      fs::remove_all(ablate_dir);
      AblateOptions a;
      a.data = data;
      a.config = desk;
      a.seeds = seeds;
      a.out = ablate_dir;
      a.workers = workers;
      a.log = log;
      summary = cmd_ablate(a);
    }

    const fs::path full_run = ablate_dir / "runs" / ("full_seed" + std::to_string(seeds.front()));
    const auto t_eval = Clock::now();
    EvalCommandOptions e;
    e.checkpoint = full_run / "model.ckpt";
    e.data = data;
    e.out = work / "eval_full";
    e.include_baselines = true;
    e.workers = workers;
    const EvalResult clean = cmd_eval(e);
    const double eval_seconds = seconds_since(t_eval);
    e.out = work / "eval_full_noisy";
    e.include_baselines = false;
    e.noisy_semantics = true;
    const EvalResult noisy = cmd_eval(e);

    {
      const SystemScores & m = clean.systems.at("model");
      const SystemScores & cv = clean.systems.at("const_velocity");
      const SystemScores & pers = clean.systems.at("persistence");
      const double dyn = m.retention.back().dyn.fraction();
      const double dyn_cv = cv.retention.back().dyn.fraction();
      const double dyn_pers = pers.retention.back().dyn.fraction();
      const double stat = m.retention.back().stat.fraction();
      const double runtime = gen_seconds + training_seconds(full_run) + eval_seconds;
      const bool a = m.mean_soft_iou() >= 1.2 * cv.mean_soft_iou();
      const bool b = dyn >= dyn_cv && dyn >= dyn_pers && stat >= 0.95;
      rep.line(4, a && b && runtime < 1800.0,
               fmt("soft-IoU %.4f vs 1.2 x const-velocity %.4f; dynamic retention at %.1f s %.1f%% vs "
                   "const-velocity %.1f%%, persistence %.1f%%; static retention %.1f%% (>=95%%); %.0f s (<1800 s)",
                   m.mean_soft_iou(), 1.2 * cv.mean_soft_iou(), clean.step_seconds * (m.soft_iou.size() - 1),
                   100.0 * dyn, 100.0 * dyn_cv, 100.0 * dyn_pers, 100.0 * stat, runtime));
    }

    {
      const AblationRow & full = summary.row("full");
      const AblationRow & sem = summary.row("dogm+sem");
      const AblationRow & dogm = summary.row("dogm");
      int ordered = 0;
      int full_beats_dogm = 0;
      std::string per_seed;
      for (std::size_t k = 0; k < summary.seeds.size(); ++k) {
        ordered += full.iou[k] >= sem.iou[k] && sem.iou[k] >= dogm.iou[k];
        full_beats_dogm += full.iou[k] > dogm.iou[k];
        per_seed += fmt("%sseed %llu: %.4f/%.4f/%.4f", k ? ", " : "", static_cast<unsigned long long>(summary.seeds[k]),
                        full.iou[k], sem.iou[k], dogm.iou[k]);
      }
      const int n = static_cast<int>(summary.seeds.size());
      rep.line(5, n == 3 && ordered >= 2 && full_beats_dogm == n,
               fmt("IoU full/dogm+sem/dogm %s; ordered in %d of %d (>=2), full > dogm in %d of %d", per_seed.c_str(),
                   ordered, n, full_beats_dogm, n));
    }

    {
      const double c = clean.systems.at("model").mean_soft_iou();
      const double nz = noisy.systems.at("model").mean_soft_iou();
      rep.line(6, c > 0.0 && nz >= 0.7 * c,
               fmt("soft-IoU with noisy semantics %.4f = %.1f%% of clean %.4f (>=70%%)", nz, c > 0 ? 100.0 * nz / c : 0.0,
                   c));
    }

    {
      const auto log_rows = read_loss_csv(full_run / "loss.csv");
      std::mt19937_64 rng(3);
      const auto mu = gt::random_tensor({4, desk.model.latent_dim}, rng);
      const auto lv = gt::random_tensor({4, desk.model.latent_dim}, rng);
      const double same = ad::kl_divergence<double>({ad::Var<double>(mu), ad::Var<double>(lv)},
                                                    {ad::Var<double>(mu), ad::Var<double>(lv)})
                              .value()[0];
      const bool have = log_rows.size() >= 2;
      const double first = have ? log_rows.front().kl : 0.0;
      const double last = have ? log_rows.back().kl : 0.0;
      rep.line(7, have && last < 0.5 * first && same == 0.0,
               fmt("KL epoch %d %.5f vs epoch 1 %.5f (ratio %.3f, <0.5); KL of identical distributions %g",
                   have ? log_rows.back().epoch : 0, last, first, first > 0 ? last / first : 0.0, same));
    }

    determinism(rep, desk, work);
    channel_invariance(rep);

    std::cout << (rep.all() ? "all criteria passed" : "some criteria failed") << std::endl;
    return rep.all() ? 0 : 1;
  } catch (const std::exception & ex) {
    std::cerr << "acceptance run aborted: " << ex.what() << "\n";
    return 1;
  }
}
