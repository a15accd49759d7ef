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

// The training loop. Each iteration k: collect trajectories with the current
// actors, fit the world model (or Q-critic), compute advantages with the
// critic as it stood at the start of the iteration, update every actor with
// PPO, then regress the critic onto the returns.

#ifndef MBCREDIT_HARNESS_TRAINER_HPP_
#define MBCREDIT_HARNESS_TRAINER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mbcredit/credit/advantages.hpp"
#include "mbcredit/credit/evaluators.hpp"
#include "mbcredit/envkit/registry.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/harness/config.hpp"
#include "mbcredit/harness/learner.hpp"
#include "mbcredit/harness/runlog.hpp"
#include "mbcredit/policy/gae.hpp"
#include "mbcredit/policy/rollout.hpp"
#include "mbcredit/policy/updates.hpp"

namespace mbcredit::harness {

using numcore::Tensor;

// Runs the actors for `steps` environment steps. Episodes reset with seeds
// derived from (seed, iteration, episode index); the last episode may be cut
// short and is then bootstrapped from the critic. Agents listed in
// `forced_default` execute the zero default action instead of their policy.
inline policy::RolloutBatch CollectRollout(
    envkit::Environment& env, const std::vector<policy::GaussianActor>& actors,
    const policy::Critic& critic, int steps, double gamma, std::uint64_t seed,
    std::uint64_t iteration, bool deterministic = false,
    std::span<const int> forced_default = {}) {
  const envkit::EnvSpec& spec = env.spec();
  const int n = spec.n_agents;
  MBCREDIT_CHECK_DIM(static_cast<int>(actors.size()) == n,
                     "one actor per agent is required");
  for (int i = 0; i < n; ++i) {
    MBCREDIT_CHECK_DIM(actors[i].obs_dim() == spec.obs_dims[i] &&
                           actors[i].action_dim() == spec.action_dims[i],
                       "actor " + std::to_string(i) +
                           " does not fit the environment spec");
  }
  MBCREDIT_CHECK(steps >= 1, "rollout needs at least one step");
  const auto T = static_cast<std::size_t>(steps);

  policy::RolloutBatch b;
  b.n_agents = n;
  b.states = Tensor::Zeros(T, spec.global_state_dim);
  b.next_states = Tensor::Zeros(T, spec.global_state_dim);
  for (int i = 0; i < n; ++i) {
    b.obs.push_back(Tensor::Zeros(T, spec.obs_dims[i]));
    b.actions.push_back(Tensor::Zeros(T, spec.action_dims[i]));
    b.sampled_actions.push_back(Tensor::Zeros(T, spec.action_dims[i]));
    b.log_probs.emplace_back(T);
  }
  b.rewards.resize(T);
  b.dones.resize(T);

  Rng rng = MakeStream(seed, {Tag(StreamTag::kRollout), iteration});
  std::uint64_t episode = 0;
  envkit::Observation ob =
      env.Reset(DeriveSeed(seed, {Tag(StreamTag::kEnvReset), iteration, episode}));
  std::vector<double> state = ob.state;
  std::vector<std::vector<double>> obs = ob.per_agent_obs;
  double episode_return = 0.0;
  envkit::JointAction joint(n);
  for (std::size_t t = 0; t < T; ++t) {
    std::copy(state.begin(), state.end(), b.states.row(t).begin());
    for (int i = 0; i < n; ++i) {
      std::copy(obs[i].begin(), obs[i].end(), b.obs[i].row(t).begin());
      policy::ActResult a = actors[i].Act(obs[i], rng, deterministic);
      if (std::find(forced_default.begin(), forced_default.end(), i) !=
          forced_default.end()) {
        std::fill(a.action.begin(), a.action.end(), 0.0);
      }
      std::copy(a.action.begin(), a.action.end(), b.actions[i].row(t).begin());
      std::copy(a.sampled.begin(), a.sampled.end(),
                b.sampled_actions[i].row(t).begin());
      b.log_probs[i][t] = a.log_prob;
      joint[i] = std::move(a.action);
    }
    envkit::StepResult r = env.Step(joint);
    std::copy(r.next_state.begin(), r.next_state.end(), b.next_states.row(t).begin());
    b.rewards[t] = r.reward;
    b.dones[t] = r.done ? 1 : 0;
    episode_return += r.reward;
    if (r.done) {
      b.episode_returns.push_back(episode_return);
      episode_return = 0.0;
      if (t + 1 < T) {
        ++episode;
        ob = env.Reset(
            DeriveSeed(seed, {Tag(StreamTag::kEnvReset), iteration, episode}));
        state = ob.state;
        obs = ob.per_agent_obs;
      }
    } else {
      state = std::move(r.next_state);
      obs = std::move(r.per_agent_obs);
    }
  }
  b.values = critic.Values(b.states);
  b.bootstrap_value = b.dones[T - 1] ? 0.0 : critic.Value(b.next_states.row(T - 1));
  b.returns = policy::DiscountedReturns(b.rewards, b.dones, b.bootstrap_value, gamma);
  b.Validate();
  return b;
}

inline double Mean(std::span<const double> x) {
  if (x.empty()) return kNotApplicable;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Population standard deviation.
inline double PopulationStd(std::span<const double> x) {
  if (x.empty()) return kNotApplicable;
  const double m = Mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline double MeanAbs(const Tensor& t) {
  if (t.size() == 0) return 0.0;
  double s = 0.0;
  for (double v : t.vec()) s += std::abs(v);
  return s / static_cast<double>(t.size());
}

struct TrainResult {
  RunLog log;
  bool failed = false;
  std::string failure;
  std::string run_dir;
};

// One seeded training run. When `run_dir` is non-empty the run log, config
// and checkpoints are written there.
class Trainer {
 public:
  Trainer(TrainConfig config, std::uint64_t seed, std::string run_dir = "")
      : config_(Validated(std::move(config))),
        method_(config_.method_spec()),
        seed_(seed),
        run_dir_(std::move(run_dir)),
        env_(envkit::MakeEnvironment(config_.env, config_.control_cost)),
        learner_(MakeLearner(config_, env_->spec(), seed_)) {
    if (method_.advantage == AdvantageKind::kSemivalue) {
      // Rejects e.g. fixed:c with c out of range before any work is done.
      credit::ParseSemivalue(method_.semivalue, env_->spec().n_agents);
    }
  }

  const TrainConfig& config() const { return config_; }
  const Learner& learner() const { return learner_; }
  Learner& learner() { return learner_; }
  envkit::Environment& env() { return *env_; }

  TrainResult Run() {
    TrainResult result;
    result.run_dir = run_dir_;
    result.log.n_agents = env_->spec().n_agents;
    std::unique_ptr<RunLogWriter> writer;
    if (!run_dir_.empty()) {
      std::filesystem::create_directories(run_dir_);
      std::ofstream(run_dir_ + "/config.txt") << SerializeConfig(config_);
      writer = std::make_unique<RunLogWriter>(run_dir_ + "/runlog.csv",
                                              run_dir_ + "/timing.csv",
                                              env_->spec().n_agents);
    }
    for (int k = 0; k < config_.iterations; ++k) {
      RunLogRow row = Iterate(k);
      if (writer) writer->Append(row);
      result.log.rows.push_back(row);
      if (!row.ok()) {
        result.failed = true;
        result.failure = row.status;
        if (!run_dir_.empty()) {
          SaveCheckpoint(run_dir_ + "/abort", config_, learner_, seed_, k);
        }
        return result;
      }
      const bool periodic =
          config_.checkpoint_every > 0 && (k + 1) % config_.checkpoint_every == 0;
      if (periodic && !run_dir_.empty()) {
        SaveCheckpoint(run_dir_ + "/ckpt_" + std::to_string(k + 1), config_,
                       learner_, seed_, k + 1);
      }
    }
    if (!run_dir_.empty()) {
      SaveCheckpoint(run_dir_ + "/final", config_, learner_, seed_,
                     config_.iterations);
    }
    return result;
  }

  // One iteration. Failures are caught and reported in the row status.
  RunLogRow Iterate(int k) {
    const auto start = std::chrono::steady_clock::now();
    const int n = env_->spec().n_agents;
    RunLogRow row;
    row.iteration = k;
    row.env_steps = static_cast<long long>(k + 1) * config_.steps_per_iteration;
    row.mean_abs_action.assign(n, kNotApplicable);
    row.mean_psi.assign(n, kNotApplicable);
    try {
      IterateImpl(k, row);
    } catch (const DiagnosticsError& e) {
      row.status = std::string("failed: ") + e.what();
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
  }

 private:
  static TrainConfig Validated(TrainConfig c) {
    ValidateConfig(c);
    return c;
  }

  static void RequireFinite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw DiagnosticsError("non-finite " + what);
  }

  void IterateImpl(int k, RunLogRow& row) {
    const int n = env_->spec().n_agents;
    const auto it = static_cast<std::uint64_t>(k);

    // Trajectories under the current actors and critic.
    policy::RolloutBatch batch =
        CollectRollout(*env_, learner_.actors, learner_.critic,
                       config_.steps_per_iteration, config_.gamma, seed_, it);
    row.mean_episode_reward = Mean(batch.episode_returns);
    row.reward_std = PopulationStd(batch.episode_returns);
    for (int i = 0; i < n; ++i) row.mean_abs_action[i] = MeanAbs(batch.actions[i]);

    // Model or Q-critic fit.
    if (learner_.model) {
      Rng rng = MakeStream(seed_, {Tag(StreamTag::kModelFit), it});
      const worldmodel::FitStats fit = learner_.model->Fit(
          batch.Transitions(), config_.model_epochs,
          static_cast<std::size_t>(config_.model_minibatch), rng);
      // One-step error on the fresh batch, before fitting to it.
      row.model_delta_mse = fit.delta_mse_before;
      row.model_reward_mse = fit.reward_mse_before;
      RequireFinite(fit.delta_mse, "world-model delta loss");
      RequireFinite(fit.reward_mse, "world-model reward loss");
    }
    if (learner_.q_critic) {
      Rng rng = MakeStream(seed_, {Tag(StreamTag::kQCritic), it});
      const auto trace = policy::QCriticUpdate(
          *learner_.q_critic, numcore::ConcatCols(batch.states, batch.JointActions()),
          batch.returns, config_.q_epochs,
          static_cast<std::size_t>(config_.critic_minibatch), rng);
      if (!trace.empty()) {
        row.model_reward_mse = trace.back();
        RequireFinite(trace.back(), "Q-critic loss");
      }
    }

    // Advantages, with the critic not yet updated this iteration.
    std::vector<std::vector<double>> adv(n);
    if (method_.advantage == AdvantageKind::kShared) {
      const auto shared =
          credit::SharedAdvantages(batch, config_.gamma, config_.gae_lambda);
      for (int i = 0; i < n; ++i) adv[i] = shared;
    } else {
      credit::CreditConfig cc;
      cc.semivalue = method_.semivalue;
      cc.samples_per_agent = config_.samples;
      cc.evaluator = method_.evaluator;
      cc.gamma = config_.gamma;
      cc.exact = config_.exact;
      const envkit::JointAction defaults =
          coopgame::ZeroDefaults(env_->spec().action_dims);
      credit::CreditResult psi;
      if (learner_.model) {
        credit::ModelBasedEvaluator eval(*learner_.model, learner_.critic,
                                         config_.gamma, defaults);
        psi = credit::PerAgentAdvantages(batch, cc, eval, seed_, it);
      } else {
        credit::QValueEvaluator eval(*learner_.q_critic, defaults);
        psi = credit::PerAgentAdvantages(batch, cc, eval, seed_, it);
      }
      for (int i = 0; i < n; ++i) {
        adv[i].resize(batch.size());
        for (std::size_t t = 0; t < batch.size(); ++t) adv[i][t] = psi.psi(t, i);
      }
    }
    for (int i = 0; i < n; ++i) {
      row.mean_psi[i] = Mean(adv[i]);
      RequireFinite(row.mean_psi[i], "advantage for agent " + std::to_string(i));
      if (config_.standardize_advantages) adv[i] = policy::Standardize(adv[i]);
    }

    // Decentralized actor updates, each on its own advantage column.
    policy::PpoConfig ppo;
    ppo.clip = config_.clip;
    ppo.epochs = config_.ppo_epochs;
    ppo.minibatch = static_cast<std::size_t>(config_.ppo_minibatch);
    for (int i = 0; i < n; ++i) {
      Rng rng = MakeStream(seed_, {Tag(StreamTag::kActor), it,
                                   static_cast<std::uint64_t>(i)});
      const policy::PpoStats stats =
          policy::PpoActorUpdate(learner_.actors[i], batch.obs[i],
                                 batch.sampled_actions[i], batch.log_probs[i],
                                 adv[i], ppo, rng);
      if (stats.skipped_minibatches > 0) {
        throw DiagnosticsError("non-finite PPO objective for agent " +
                               std::to_string(i) + ": " + stats.diagnostic);
      }
    }

    // Critic regression onto the returns.
    Rng rng = MakeStream(seed_, {Tag(StreamTag::kCritic), it});
    const auto trace = policy::CriticUpdate(
        learner_.critic, batch.states, batch.returns, config_.critic_epochs,
        static_cast<std::size_t>(config_.critic_minibatch), rng);
    if (!trace.empty()) {
      row.critic_loss = trace.back();
      RequireFinite(row.critic_loss, "critic loss");
    }
  }

  TrainConfig config_;
  MethodSpec method_;
  std::uint64_t seed_;
  std::string run_dir_;
  std::unique_ptr<envkit::Environment> env_;
  Learner learner_;
};

inline std::string SeedDir(const std::string& out, std::uint64_t seed) {
  return out + "/seed_" + std::to_string(seed);
}

// Trains every seed in the config, each in <out>/seed_<s>.
inline std::vector<TrainResult> Train(const TrainConfig& config) {
  ValidateConfig(config);
  std::vector<TrainResult> results;
  for (std::uint64_t s : config.seeds) {
    Trainer trainer(config, s, config.out.empty() ? "" : SeedDir(config.out, s));
    results.push_back(trainer.Run());
  }
  return results;
}

}  // namespace mbcredit::harness

#endif  // MBCREDIT_HARNESS_TRAINER_HPP_
