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

// Offline use of a checkpoint: deterministic evaluation and per-step credit
// reports.

#ifndef MBCREDIT_HARNESS_REPORTS_HPP_
#define MBCREDIT_HARNESS_REPORTS_HPP_

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mbcredit/credit/advantages.hpp"
#include "mbcredit/credit/evaluators.hpp"
#include "mbcredit/envkit/registry.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/harness/learner.hpp"
#include "mbcredit/harness/runlog.hpp"
#include "mbcredit/harness/trainer.hpp"

namespace mbcredit::harness {

struct EvalSummary {
  int episodes = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;  // population std over episodes
  std::vector<double> mean_abs_action;
  std::vector<double> episode_returns;
};

// Rolls out the actor means for `episodes` full episodes; nothing is updated.
inline EvalSummary EvaluateLearner(const Learner& learner, envkit::Environment& env,
                                   int episodes, std::uint64_t seed) {
  if (episodes < 1) {
    throw ContractError("evaluate needs at least one episode, got " +
                        std::to_string(episodes));
  }
  const envkit::EnvSpec& spec = env.spec();
  const int n = spec.n_agents;
  MBCREDIT_CHECK_DIM(static_cast<int>(learner.actors.size()) == n,
                     "checkpoint agent count differs from the environment");
  for (int i = 0; i < n; ++i) {
    MBCREDIT_CHECK_DIM(learner.actors[i].obs_dim() == spec.obs_dims[i] &&
                           learner.actors[i].action_dim() == spec.action_dims[i],
                       "actor " + std::to_string(i) +
                           " does not fit the environment spec");
  }
  EvalSummary s;
  s.episodes = episodes;
  std::vector<double> abs_sum(n, 0.0);
  std::vector<double> abs_count(n, 0.0);
  Rng unused = MakeStream(seed, {Tag(StreamTag::kRollout)});
  for (int e = 0; e < episodes; ++e) {
    envkit::Observation ob = env.Reset(
        DeriveSeed(seed, {Tag(StreamTag::kEnvReset), static_cast<std::uint64_t>(e)}));
    auto obs = ob.per_agent_obs;
    double ret = 0.0;
    envkit::JointAction joint(n);
    for (int t = 0;; ++t) {
      for (int i = 0; i < n; ++i) {
        joint[i] = learner.actors[i].Act(obs[i], unused, true).action;
        for (double a : joint[i]) abs_sum[i] += std::abs(a);
        abs_count[i] += static_cast<double>(joint[i].size());
      }
      envkit::StepResult r = env.Step(joint);
      ret += r.reward;
      if (r.done) break;
      MBCREDIT_CHECK(t < 10'000'000, "episode never terminated");
      obs = std::move(r.per_agent_obs);
    }
    s.episode_returns.push_back(ret);
  }
  s.mean_reward = Mean(s.episode_returns);
  s.std_reward = PopulationStd(s.episode_returns);
  for (int i = 0; i < n; ++i) s.mean_abs_action.push_back(abs_sum[i] / abs_count[i]);
  return s;
}

inline EvalSummary Evaluate(const std::string& checkpoint_dir,
                            const std::string& env_id, int episodes,
                            std::uint64_t seed) {
  if (episodes < 1) {
    throw ContractError("evaluate needs at least one episode, got " +
                        std::to_string(episodes));
  }
  const TrainConfig config = LoadConfig(checkpoint_dir + "/config.txt");
  auto env = envkit::MakeEnvironment(env_id, config.control_cost);
  const Checkpoint ckpt = LoadCheckpoint(checkpoint_dir, env->spec());
  return EvaluateLearner(ckpt.learner, *env, episodes, seed);
}

struct CreditReportOptions {
  int samples = 0;                // 0: the checkpoint's samples setting
  bool exact = false;             // enumerate every coalition
  std::vector<int> dummy_agents;  // forced to the default action
};

struct CreditReportData {
  int iteration = 0;
  int n_agents = 0;
  std::string semivalue;
  Tensor states;
  std::vector<envkit::JointAction> actions;
  credit::CreditResult credit;
  std::vector<int> coalition_samples;  // per agent and step
};

// Builds the coalition evaluator the checkpoint was trained with and runs
// `fn(const credit::RowEvaluator&)` with it.
template <typename Fn>
auto WithEvaluator(const Checkpoint& ckpt, const envkit::EnvSpec& spec, Fn&& fn) {
  const envkit::JointAction defaults = coopgame::ZeroDefaults(spec.action_dims);
  if (ckpt.learner.model) {
    credit::ModelBasedEvaluator eval(*ckpt.learner.model, ckpt.learner.critic,
                                     ckpt.config.gamma, defaults);
    return fn(static_cast<const credit::RowEvaluator&>(eval));
  }
  if (ckpt.learner.q_critic) {
    credit::QValueEvaluator eval(*ckpt.learner.q_critic, defaults);
    return fn(static_cast<const credit::RowEvaluator&>(eval));
  }
  throw ConfigError("checkpoint trained with method '" + ckpt.config.method +
                    "' has no coalition evaluator");
}

// Runs the frozen policy for `steps` steps and computes psi for every step
// and agent with the checkpoint's semivalue.
inline CreditReportData CreditReport(const Checkpoint& ckpt, envkit::Environment& env,
                                     int steps, std::uint64_t seed,
                                     const CreditReportOptions& options = {}) {
  MBCREDIT_CHECK(steps >= 1, "credit report needs at least one step");
  const MethodSpec method = ParseMethod(ckpt.config.method);
  const int n = env.spec().n_agents;
  for (int d : options.dummy_agents) {
    MBCREDIT_CHECK(d >= 0 && d < n, "dummy agent index out of range");
  }
  policy::RolloutBatch batch =
      CollectRollout(env, ckpt.learner.actors, ckpt.learner.critic, steps,
                     ckpt.config.gamma, seed, 0, false, options.dummy_agents);
  CreditReportData r;
  r.iteration = ckpt.manifest.iteration;
  r.n_agents = n;
  r.semivalue = method.semivalue.empty() ? "shapley" : method.semivalue;
  r.states = batch.states;
  for (std::size_t t = 0; t < batch.size(); ++t) r.actions.push_back(batch.joint_action(t));
  const int samples = options.samples > 0 ? options.samples : ckpt.config.samples;
  const bool exact = options.exact || ckpt.config.exact;
  const coopgame::SemivalueSpec spec = credit::ParseSemivalue(r.semivalue, n);
  r.credit = WithEvaluator(ckpt, env.spec(), [&](const credit::RowEvaluator& eval) {
    return credit::PerAgentAdvantages(r.states, r.actions, eval, spec, samples,
                                      exact, seed, 0);
  });
  const int per_agent = r.credit.exact ? (1 << (n - 1)) : samples;
  r.coalition_samples.assign(static_cast<std::size_t>(steps) * n, per_agent);
  return r;
}

inline CreditReportData CreditReport(const std::string& checkpoint_dir,
                                     const std::string& env_id, int steps,
                                     std::uint64_t seed,
                                     const CreditReportOptions& options = {}) {
  const TrainConfig config = LoadConfig(checkpoint_dir + "/config.txt");
  auto env = envkit::MakeEnvironment(env_id, config.control_cost);
  const Checkpoint ckpt = LoadCheckpoint(checkpoint_dir, env->spec());
  return CreditReport(ckpt, *env, steps, seed, options);
}

// Long format: `steps` rows per agent, agents in order.
inline void WriteCreditCsv(std::ostream& out, const CreditReportData& r) {
  out << "iteration,t,agent,psi,coalition_samples\n";
  const std::size_t T = r.actions.size();
  for (int i = 0; i < r.n_agents; ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      out << r.iteration << "," << t << "," << i << ","
          << FormatFloat(r.credit.psi(t, i)) << ","
          << r.coalition_samples[t * r.n_agents + i] << "\n";
    }
  }
}

inline void WriteCreditCsv(const std::string& path, const CreditReportData& r) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  WriteCreditCsv(out, r);
}

}  // namespace mbcredit::harness

#endif  // MBCREDIT_HARNESS_REPORTS_HPP_
