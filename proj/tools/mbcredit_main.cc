// Copyright 2026 The mbcredit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, evaluate, credit-report, plot.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/harness/config.hpp"
#include "mbcredit/harness/plot.hpp"
#include "mbcredit/harness/reports.hpp"
#include "mbcredit/harness/runlog.hpp"
#include "mbcredit/harness/trainer.hpp"

namespace {

using mbcredit::harness::FormatFloat;

int RunTrain(const std::string& config_path, const std::vector<std::uint64_t>& seed,
             const std::string& method, const std::string& env, int samples,
             int iters, const std::string& out) {
  mbcredit::harness::TrainConfig config;
  if (!config_path.empty()) config = mbcredit::harness::LoadConfig(config_path);
  if (!seed.empty()) config.seeds = seed;
  if (!method.empty()) config.method = method;
  if (!env.empty()) config.env = env;
  if (samples > 0) config.samples = samples;
  if (iters >= 0) config.iterations = iters;
  if (!out.empty()) config.out = out;
  mbcredit::harness::ValidateConfig(config);

  int status = 0;
  for (std::uint64_t s : config.seeds) {
    const std::string dir = mbcredit::harness::SeedDir(config.out, s);
    mbcredit::harness::Trainer trainer(config, s, dir);
    const auto result = trainer.Run();
    const auto& rows = result.log.rows;
    std::printf("seed %llu: %zu iterations -> %s", static_cast<unsigned long long>(s),
                rows.size(), dir.c_str());
    if (!rows.empty()) {
      std::printf(" (last mean reward %s)",
                  FormatFloat(rows.back().mean_episode_reward).c_str());
    }
    std::printf("\n");
    if (result.failed) {
      std::fprintf(stderr, "seed %llu aborted: %s\n",
                   static_cast<unsigned long long>(s), result.failure.c_str());
      status = 3;
    }
  }
  return status;
}

int RunEvaluate(const std::string& ckpt, const std::string& env, int episodes,
                std::uint64_t seed) {
  const auto s = mbcredit::harness::Evaluate(ckpt, env, episodes, seed);
  std::printf("episodes=%d\nmean_reward=%s\nstd_reward=%s\n", s.episodes,
              FormatFloat(s.mean_reward).c_str(), FormatFloat(s.std_reward).c_str());
  for (std::size_t i = 0; i < s.mean_abs_action.size(); ++i) {
    std::printf("mean_abs_action_%zu=%s\n", i,
                FormatFloat(s.mean_abs_action[i]).c_str());
  }
  return 0;
}

int RunCreditReport(const std::string& ckpt, const std::string& env, int steps,
                    std::uint64_t seed, const std::string& out, bool exact,
                    int samples, const std::vector<int>& dummies) {
  mbcredit::harness::CreditReportOptions options;
  options.exact = exact;
  options.samples = samples;
  options.dummy_agents = dummies;
  const auto report = mbcredit::harness::CreditReport(ckpt, env, steps, seed, options);
  if (out.empty() || out == "-") {
    mbcredit::harness::WriteCreditCsv(std::cout, report);
  } else {
    mbcredit::harness::WriteCreditCsv(out, report);
  }
  return 0;
}

int RunPlot(const std::vector<std::string>& dirs, const std::string& out) {
  const auto agg = mbcredit::harness::Plot(dirs, out);
  for (const auto& w : agg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& c : agg.curves) {
    std::printf("%s: %d runs, %zu iterations\n", c.method.c_str(), c.runs,
                c.points.size());
  }
  std::printf("wrote %s/aggregate.csv, reward.svg, actions.svg\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-based multiagent credit assignment"};
  app.require_subcommand(1);

  std::string config_path, method, env, out;
  std::vector<std::uint64_t> seeds;
  int samples = 0, iters = -1;
  auto* train = app.add_subcommand("train", "Train one run per seed");
  train->add_option("--config", config_path, "key=value config file");
  train->add_option("--seed,--seeds", seeds, "Seed(s); overrides the config list")
      ->delimiter(',');
  train->add_option("--method", method,
                    "mb-shapley | mb-banzhaf | mb-loo | mb-fixed:<c> | q-shapley | mappo");
  train->add_option("--env", env, "chain4 | chain6 | additive | linear");
  train->add_option("--samples", samples, "Coalition samples per agent and step");
  train->add_option("--iters", iters, "Training iterations");
  train->add_option("--out", out, "Output directory");

  std::string ckpt, eval_env;
  int episodes = 10;
  std::uint64_t eval_seed = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Deterministic policy evaluation");
  evaluate->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  evaluate->add_option("--env", eval_env, "Environment id")->required();
  evaluate->add_option("--episodes", episodes, "Episodes");
  evaluate->add_option("--seed", eval_seed, "Seed");

  std::string cr_ckpt, cr_env, cr_out;
  int steps = 200, cr_samples = 0;
  std::uint64_t cr_seed = 0;
  bool exact = false;
  std::vector<int> dummies;
  auto* report = app.add_subcommand("credit-report", "Per-step psi of a frozen policy");
  report->add_option("--ckpt", cr_ckpt, "Checkpoint directory")->required();
  report->add_option("--env", cr_env, "Environment id")->required();
  report->add_option("--steps", steps, "Rollout steps");
  report->add_option("--seed", cr_seed, "Seed");
  report->add_option("--out", cr_out, "CSV path (default stdout)");
  report->add_flag("--exact", exact, "Enumerate all coalitions");
  report->add_option("--samples", cr_samples, "Override coalition samples");
  report->add_option("--dummy", dummies, "Agents forced to the default action");

  std::vector<std::string> plot_dirs;
  std::string plot_out = "plots";
  auto* plot = app.add_subcommand("plot", "Aggregate run logs across seeds");
  plot->add_option("dirs", plot_dirs, "Run directories")->required();
  plot->add_option("--out", plot_out, "Output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return RunTrain(config_path, seeds, method, env, samples, iters, out);
    if (*evaluate) return RunEvaluate(ckpt, eval_env, episodes, eval_seed);
    if (*report) {
      return RunCreditReport(cr_ckpt, cr_env, steps, cr_seed, cr_out, exact,
                             cr_samples, dummies);
    }
    if (*plot) return RunPlot(plot_dirs, plot_out);
  } catch (const mbcredit::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
