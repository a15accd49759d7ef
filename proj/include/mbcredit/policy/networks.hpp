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

#ifndef MBCREDIT_POLICY_NETWORKS_HPP_
#define MBCREDIT_POLICY_NETWORKS_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/adam.hpp"
#include "mbcredit/numcore/autodiff.hpp"
#include "mbcredit/numcore/checkpoint.hpp"
#include "mbcredit/numcore/mlp.hpp"
#include "mbcredit/numcore/rng.hpp"
#include "mbcredit/worldmodel/normalizer.hpp"

namespace mbcredit::policy {

using numcore::Activation;
using numcore::Mlp;
using numcore::Tape;
using numcore::Tensor;
using numcore::Var;

struct NetworkConfig {
  std::size_t width = 32;
  std::size_t depth = 3;
  double learning_rate = 1e-3;
  double max_grad_norm = 0.0;
};

// Scalar regressor trained on standardized targets. The running target
// statistics live beside the network; when they move, the output layer is
// rescaled so that predictions are unchanged by the statistics update.
class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(std::size_t input_dim, NetworkConfig config, Rng& rng)
      : net_(numcore::StackWidths(input_dim, config.width, config.depth, 1),
             Activation::kTanh, Activation::kIdentity, rng),
        opt_(numcore::MakeAdam(config.learning_rate, config.max_grad_norm)),
        targets_(1) {}

  std::vector<double> Predict(const Tensor& inputs) const {
    const Tensor z = net_.Forward(inputs);
    std::vector<double> out(z.rows());
    for (std::size_t r = 0; r < z.rows(); ++r) out[r] = targets_.Denormalize(0, z[r]);
    return out;
  }

  // Folds `targets` into the running statistics and returns them standardized.
  std::vector<double> ObserveTargets(std::span<const double> targets) {
    const double old_mean = targets_.mean(0), old_scale = targets_.scale(0);
    targets_.Update(Tensor({targets.size(), 1},
                           std::vector<double>(targets.begin(), targets.end())));
    const double mean = targets_.mean(0), scale = targets_.scale(0);
    const std::size_t last = net_.num_layers() - 1;
    net_.weight(last).matrix() *= old_scale / scale;
    Tensor& b = net_.bias(last);
    b[0] = (old_scale * b[0] + old_mean - mean) / scale;
    std::vector<double> z(targets.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = targets_.Normalize(0, targets[k]);
    return z;
  }

  double target_scale() const { return targets_.scale(0); }
  const worldmodel::RunningNormalizer& target_stats() const { return targets_; }

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  numcore::AdamState& optimizer() { return opt_; }

  void Export(const std::string& prefix,
              std::vector<numcore::NamedTensor>& out) const {
    numcore::ExportMlp(prefix, net_, out);
    out.push_back({prefix + ".targets", targets_.ToTensor()});
  }
  void Import(const std::string& prefix,
              std::span<const numcore::NamedTensor> items) {
    numcore::ImportMlp(prefix, items, net_);
    targets_ = worldmodel::RunningNormalizer::FromTensor(
        numcore::FindTensor(items, prefix + ".targets"));
  }

 private:
  Mlp net_;
  numcore::AdamState opt_;
  worldmodel::RunningNormalizer targets_;
};

// Centralized state-value critic V(s).
class Critic : public ValueNet {
 public:
  Critic() = default;
  Critic(std::size_t state_dim, NetworkConfig config, Rng& rng)
      : ValueNet(state_dim, config, rng) {}

  std::vector<double> Values(const Tensor& states) const { return Predict(states); }
  double Value(std::span<const double> state) const {
    return Predict(Tensor::Row(state))[0];
  }
};

// Centralized action-value critic Q(s, a) on the flattened joint action.
class QCritic : public ValueNet {
 public:
  QCritic() = default;
  QCritic(std::size_t state_dim, std::size_t joint_action_dim,
          NetworkConfig config, Rng& rng)
      : ValueNet(state_dim + joint_action_dim, config, rng) {}

  // `inputs` rows are [state | joint action].
  std::vector<double> Values(const Tensor& inputs) const { return Predict(inputs); }
};

struct ActorConfig {
  std::size_t width = 32;
  std::size_t depth = 3;
  double learning_rate = 3e-4;
  double log_std_init = -0.5;
  double max_grad_norm = 0.0;
};

struct ActResult {
  std::vector<double> action;   // clamped to [-1, 1]
  std::vector<double> sampled;  // the Gaussian draw before clamping
  double log_prob = 0.0;        // log density of `sampled`
};

// Decentralized Gaussian policy: mean = tanh-output MLP of the local
// observation, state-independent learned log standard deviation.
class GaussianActor {
 public:
  GaussianActor() = default;
  GaussianActor(std::size_t obs_dim, std::size_t action_dim,
                ActorConfig config, Rng& rng)
      : mean_net_(numcore::StackWidths(obs_dim, config.width, config.depth,
                                       action_dim),
                  Activation::kTanh, Activation::kTanh, rng),
        log_std_(Tensor::Filled(1, action_dim, config.log_std_init)),
        opt_(numcore::MakeAdam(config.learning_rate, config.max_grad_norm)) {}

  std::size_t obs_dim() const { return mean_net_.input_size(); }
  std::size_t action_dim() const { return mean_net_.output_size(); }

  Mlp& mean_net() { return mean_net_; }
  const Mlp& mean_net() const { return mean_net_; }
  Tensor& log_std() { return log_std_; }
  const Tensor& log_std() const { return log_std_; }
  numcore::AdamState& optimizer() { return opt_; }

  std::vector<Tensor*> Parameters() {
    auto p = mean_net_.Parameters();
    p.push_back(&log_std_);
    return p;
  }

  Tensor Mean(const Tensor& obs) const { return mean_net_.Forward(obs); }

  ActResult Act(std::span<const double> obs, Rng& rng,
                bool deterministic) const {
    const Tensor mean = Mean(Tensor::Row(obs));
    ActResult r;
    r.sampled.resize(action_dim());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t d = 0; d < action_dim(); ++d) {
      const double sd = std::exp(log_std_[d]);
      r.sampled[d] = deterministic ? mean[d] : mean[d] + sd * normal(rng);
    }
    r.log_prob = LogDensity(mean.row(0), r.sampled);
    r.action = r.sampled;
    for (double& a : r.action) a = std::clamp(a, -1.0, 1.0);
    return r;
  }

  // log N(x; mean, diag exp(log_std)^2) summed over action coordinates.
  double LogDensity(std::span<const double> mean,
                    std::span<const double> x) const {
    double lp = 0.0;
    for (std::size_t d = 0; d < action_dim(); ++d) {
      const double z = (x[d] - mean[d]) * std::exp(-log_std_[d]);
      lp += -0.5 * z * z - log_std_[d] - kHalfLogTwoPi;
    }
    return lp;
  }

  std::vector<double> LogProbs(const Tensor& obs, const Tensor& sampled) const {
    const Tensor mean = Mean(obs);
    std::vector<double> out(obs.rows());
    for (std::size_t t = 0; t < obs.rows(); ++t) {
      out[t] = LogDensity(mean.row(t), sampled.row(t));
    }
    return out;
  }

  // Recorded log densities, shape (B, 1).
  Var LogProbs(Tape& tape, const Tensor& obs, const Tensor& sampled) const {
    namespace ops = numcore::ops;
    Var mean = mean_net_.Forward(tape, tape.Constant(obs));
    Var log_std = tape.Parameter(log_std_);
    Var z = ops::MulRow(ops::Sub(tape.Constant(sampled), mean),
                        ops::Exp(ops::Scale(log_std, -1.0)));
    Var quad = ops::Scale(ops::SumCols(ops::Square(z)), -0.5);
    Var norm = ops::AddScalar(
        ops::Scale(ops::Sum(log_std), -1.0),
        -kHalfLogTwoPi * static_cast<double>(action_dim()));
    return ops::AddRow(quad, norm);
  }

  void Export(const std::string& prefix,
              std::vector<numcore::NamedTensor>& out) const {
    numcore::ExportMlp(prefix + ".mean", mean_net_, out);
    out.push_back({prefix + ".log_std", log_std_});
  }
  void Import(const std::string& prefix,
              std::span<const numcore::NamedTensor> items) {
    numcore::ImportMlp(prefix + ".mean", items, mean_net_);
    const Tensor& ls = numcore::FindTensor(items, prefix + ".log_std");
    MBCREDIT_CHECK_DIM(ls.shape() == log_std_.shape(), "log_std shape");
    log_std_ = ls;
  }

  static constexpr double kHalfLogTwoPi = 0.91893853320467274178;

 private:
  Mlp mean_net_;
  Tensor log_std_;
  numcore::AdamState opt_;
};

}  // namespace mbcredit::policy

#endif  // MBCREDIT_POLICY_NETWORKS_HPP_
