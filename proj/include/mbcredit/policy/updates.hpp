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

#ifndef MBCREDIT_POLICY_UPDATES_HPP_
#define MBCREDIT_POLICY_UPDATES_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/adam.hpp"
#include "mbcredit/numcore/autodiff.hpp"
#include "mbcredit/numcore/rng.hpp"
#include "mbcredit/policy/networks.hpp"

namespace mbcredit::policy {

namespace internal {

inline std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace internal

// Minibatch Adam regression of `net` onto scalar `targets`. Returns the mean
// minibatch loss of each epoch.
inline std::vector<double> RegressionUpdate(Mlp& net, numcore::AdamState& opt,
                                            const Tensor& inputs,
                                            std::span<const double> targets,
                                            int epochs, std::size_t minibatch,
                                            Rng& rng) {
  MBCREDIT_CHECK_DIM(inputs.rows() == targets.size(),
                     "regression inputs and targets differ in length");
  MBCREDIT_CHECK(minibatch >= 1, "minibatch must be positive");
  std::vector<double> trace;
  if (targets.empty()) return trace;
  const Tensor target_col({targets.size(), 1},
                          std::vector<double>(targets.begin(), targets.end()));
  auto order = internal::Iota(targets.size());
  const auto params = net.Parameters();
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += minibatch) {
      const std::size_t end = std::min(order.size(), start + minibatch);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      Tape tape;
      Var pred = net.Forward(tape, tape.Constant(numcore::GatherRows(inputs, idx)));
      Var loss = numcore::ops::MeanSquaredError(
          pred, numcore::GatherRows(target_col, idx));
      total += loss.value().item();
      ++batches;
      numcore::ApplyAdam(opt, params, tape.Backward(loss));
    }
    trace.push_back(total / batches);
  }
  return trace;
}

// Fits a value network to raw targets through its running standardization.
// The returned per-epoch losses are in target units squared.
inline std::vector<double> ValueUpdate(ValueNet& value, const Tensor& inputs,
                                       std::span<const double> targets,
                                       int epochs, std::size_t minibatch,
                                       Rng& rng) {
  MBCREDIT_CHECK_DIM(inputs.rows() == targets.size(),
                     "regression inputs and targets differ in length");
  if (epochs <= 0 || targets.empty()) return {};
  const std::vector<double> z = value.ObserveTargets(targets);
  std::vector<double> trace = RegressionUpdate(value.net(), value.optimizer(),
                                               inputs, z, epochs, minibatch, rng);
  const double s2 = value.target_scale() * value.target_scale();
  for (double& l : trace) l *= s2;
  return trace;
}

// Fits V(s_t) to the empirical returns G_t.
inline std::vector<double> CriticUpdate(Critic& critic, const Tensor& states,
                                        std::span<const double> returns,
                                        int epochs, std::size_t minibatch,
                                        Rng& rng) {
  return ValueUpdate(critic, states, returns, epochs, minibatch, rng);
}

// Fits Q(s_t, a_t) to G_t; `state_actions` rows are [s_t | a_t].
inline std::vector<double> QCriticUpdate(QCritic& critic,
                                         const Tensor& state_actions,
                                         std::span<const double> returns,
                                         int epochs, std::size_t minibatch,
                                         Rng& rng) {
  return ValueUpdate(critic, state_actions, returns, epochs, minibatch, rng);
}

struct PpoConfig {
  double clip = 0.2;
  int epochs = 10;
  std::size_t minibatch = 64;
};

struct PpoStats {
  std::vector<double> objective;  // mean clipped surrogate per epoch
  int skipped_minibatches = 0;
  std::string diagnostic;
};

// Recorded clipped surrogate mean(min(r A, clip(r, 1-eps, 1+eps) A)) with
// r = exp(log pi(a|s) - log pi_old(a|s)).
inline Var ClippedSurrogate(const GaussianActor& actor, Tape& tape,
                            const Tensor& obs, const Tensor& sampled,
                            const Tensor& old_log_probs,
                            const Tensor& advantages, double clip) {
  namespace ops = numcore::ops;
  Var logp = actor.LogProbs(tape, obs, sampled);
  Var ratio = ops::Exp(ops::Sub(logp, tape.Constant(old_log_probs)));
  Var adv = tape.Constant(advantages);
  Var unclipped = ops::Mul(ratio, adv);
  Var clipped = ops::Mul(ops::Clip(ratio, 1.0 - clip, 1.0 + clip), adv);
  return ops::Mean(ops::Minimum(unclipped, clipped));
}

// PPO-clip ascent on one actor's own parameters. Minibatches whose ratios
// turn non-finite are skipped and reported.
inline PpoStats PpoActorUpdate(GaussianActor& actor, const Tensor& obs,
                               const Tensor& sampled_actions,
                               std::span<const double> old_log_probs,
                               std::span<const double> advantages,
                               const PpoConfig& config, Rng& rng) {
  const std::size_t n = obs.rows();
  MBCREDIT_CHECK_DIM(sampled_actions.rows() == n && old_log_probs.size() == n &&
                         advantages.size() == n,
                     "PPO inputs must be aligned per timestep");
  MBCREDIT_CHECK(config.minibatch >= 1, "minibatch must be positive");
  PpoStats stats;
  if (n == 0) return stats;
  const Tensor old_col({n, 1},
                       std::vector<double>(old_log_probs.begin(), old_log_probs.end()));
  const Tensor adv_col({n, 1},
                       std::vector<double>(advantages.begin(), advantages.end()));
  auto order = internal::Iota(n);
  const auto params = actor.Parameters();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    int used = 0;
    for (std::size_t start = 0; start < n; start += config.minibatch) {
      const std::size_t end = std::min(n, start + config.minibatch);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      Tape tape;
      Var objective = ClippedSurrogate(
          actor, tape, numcore::GatherRows(obs, idx),
          numcore::GatherRows(sampled_actions, idx),
          numcore::GatherRows(old_col, idx), numcore::GatherRows(adv_col, idx),
          config.clip);
      const double value = objective.value().item();
      if (!std::isfinite(value)) {
        ++stats.skipped_minibatches;
        stats.diagnostic = "non-finite probability ratio in epoch " +
                           std::to_string(epoch);
        continue;
      }
      numcore::Gradients grads = tape.Backward(numcore::ops::Scale(objective, -1.0));
      try {
        numcore::ApplyAdam(actor.optimizer(), params, grads);
      } catch (const DiagnosticsError& e) {
        ++stats.skipped_minibatches;
        stats.diagnostic = e.what();
        continue;
      }
      total += value;
      ++used;
    }
    stats.objective.push_back(used ? total / used : 0.0);
  }
  return stats;
}

}  // namespace mbcredit::policy

#endif  // MBCREDIT_POLICY_UPDATES_HPP_
