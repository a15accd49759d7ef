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

// Learned one-step model of the environment:
//   next state  s' ≈ s + f_s(s, a)
//   reward      r  ≈ f_r(s, a)
// Inputs are standardized with running statistics. The state delta is only
// rescaled (never shifted), so a zero f_s network predicts s' = s exactly.
// The reward head is shifted and scaled, so a zero f_r network predicts the
// running reward mean.

#ifndef MBCREDIT_WORLDMODEL_WORLD_MODEL_HPP_
#define MBCREDIT_WORLDMODEL_WORLD_MODEL_HPP_

#include <algorithm>
#include <cstddef>
#include <numeric>
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

namespace mbcredit::worldmodel {

using numcore::Activation;
using numcore::Mlp;

struct WorldModelConfig {
  std::size_t dynamics_width = 128;
  std::size_t dynamics_depth = 4;
  std::size_t reward_width = 128;
  std::size_t reward_depth = 3;
  double learning_rate = 1e-3;
};

// Transitions (s_t, a_t, s_{t+1}, r_t), one per row. Each row carries its own
// successor, so no pair ever straddles an episode boundary.
struct TransitionSet {
  Tensor states;
  Tensor actions;
  Tensor next_states;
  std::vector<double> rewards;

  std::size_t size() const { return rewards.size(); }

  void Validate() const {
    const std::size_t n = rewards.size();
    MBCREDIT_CHECK_DIM(states.rows() == n && actions.rows() == n &&
                           next_states.rows() == n,
                       "transition arrays must share their length");
    MBCREDIT_CHECK_DIM(states.cols() == next_states.cols(),
                       "state and next-state widths differ");
  }
};

struct Prediction {
  std::vector<double> next_state;
  double reward = 0.0;
};

struct FitStats {
  double delta_mse_before = 0.0;
  double reward_mse_before = 0.0;
  double delta_mse = 0.0;
  double reward_mse = 0.0;
  int steps = 0;
};

struct ModelErrors {
  double delta_mse = 0.0;   // mean over rows and coordinates
  double reward_mse = 0.0;
};

class WorldModel {
 public:
  WorldModel() = default;

  WorldModel(std::size_t state_dim, std::size_t action_dim,
             WorldModelConfig config, Rng& rng)
      : state_dim_(state_dim),
        action_dim_(action_dim),
        config_(config),
        dynamics_(numcore::StackWidths(state_dim + action_dim,
                                       config.dynamics_width,
                                       config.dynamics_depth, state_dim),
                  Activation::kRelu, Activation::kIdentity, rng),
        reward_(numcore::StackWidths(state_dim + action_dim,
                                     config.reward_width, config.reward_depth,
                                     1),
                Activation::kRelu, Activation::kIdentity, rng),
        input_norm_(state_dim + action_dim),
        delta_norm_(state_dim),
        reward_norm_(1),
        dynamics_opt_(numcore::MakeAdam(config.learning_rate)),
        reward_opt_(numcore::MakeAdam(config.learning_rate)) {}

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  const WorldModelConfig& config() const { return config_; }

  Mlp& dynamics() { return dynamics_; }
  const Mlp& dynamics() const { return dynamics_; }
  Mlp& reward() { return reward_; }
  const Mlp& reward() const { return reward_; }
  const RunningNormalizer& input_normalizer() const { return input_norm_; }
  const RunningNormalizer& delta_normalizer() const { return delta_norm_; }
  const RunningNormalizer& reward_normalizer() const { return reward_norm_; }

  // Batched prediction; `states` is (B, state_dim), `actions` (B, action_dim).
  void PredictBatch(const Tensor& states, const Tensor& actions,
                    Tensor* next_states, std::vector<double>* rewards) const {
    MBCREDIT_CHECK_DIM(states.cols() == state_dim_,
                       "state width " + std::to_string(states.cols()) +
                           ", model expects " + std::to_string(state_dim_));
    MBCREDIT_CHECK_DIM(actions.cols() == action_dim_,
                       "action width " + std::to_string(actions.cols()) +
                           ", model expects " + std::to_string(action_dim_));
    MBCREDIT_CHECK_DIM(states.rows() == actions.rows(), "batch length mismatch");
    const Tensor input = input_norm_.Normalize(numcore::ConcatCols(states, actions));
    if (next_states != nullptr) {
      const Tensor delta = dynamics_.Forward(input);
      *next_states = states;
      for (std::size_t r = 0; r < states.rows(); ++r) {
        for (std::size_t k = 0; k < state_dim_; ++k) {
          (*next_states)(r, k) += delta_norm_.scale(k) * delta(r, k);
        }
      }
    }
    if (rewards != nullptr) {
      const Tensor out = reward_.Forward(input);
      rewards->resize(states.rows());
      for (std::size_t r = 0; r < states.rows(); ++r) {
        (*rewards)[r] = reward_norm_.Denormalize(0, out(r, 0));
      }
    }
  }

  Prediction Predict(std::span<const double> state,
                     std::span<const double> joint_action) const {
    Tensor next;
    std::vector<double> r;
    PredictBatch(Tensor::Row(state), Tensor::Row(joint_action), &next, &r);
    return Prediction{next.ToVector(), r[0]};
  }

  ModelErrors Evaluate(const TransitionSet& data) const {
    data.Validate();
    ModelErrors e;
    if (data.size() == 0) return e;
    Tensor next;
    std::vector<double> r;
    PredictBatch(data.states, data.actions, &next, &r);
    double ds = 0.0, rs = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t k = 0; k < state_dim_; ++k) {
        const double d = next(i, k) - data.next_states(i, k);
        ds += d * d;
      }
      const double d = r[i] - data.rewards[i];
      rs += d * d;
    }
    e.delta_mse = ds / static_cast<double>(data.size() * state_dim_);
    e.reward_mse = rs / static_cast<double>(data.size());
    return e;
  }

  // Folds `data` into the running statistics, then runs `epochs` passes of
  // shuffled minibatch Adam on both heads. A final partial minibatch is
  // still used, so data shorter than one minibatch gives one full-batch step
  // per epoch.
  FitStats Fit(const TransitionSet& data, int epochs, std::size_t minibatch,
               Rng& rng) {
    data.Validate();
    MBCREDIT_CHECK(data.size() > 0, "cannot fit a world model on no data");
    MBCREDIT_CHECK(minibatch >= 1, "minibatch must be positive");
    MBCREDIT_CHECK_DIM(data.states.cols() == state_dim_ &&
                           data.actions.cols() == action_dim_,
                       "transition widths do not match the model");

    Tensor deltas = data.next_states;
    deltas.matrix() -= data.states.matrix();
    Tensor reward_col({data.size(), 1}, data.rewards);
    const Tensor raw_inputs = numcore::ConcatCols(data.states, data.actions);
    input_norm_.Update(raw_inputs);
    delta_norm_.Update(deltas);
    reward_norm_.Update(reward_col);

    FitStats stats;
    const ModelErrors before = Evaluate(data);
    stats.delta_mse_before = before.delta_mse;
    stats.reward_mse_before = before.reward_mse;

    const Tensor inputs = input_norm_.Normalize(raw_inputs);
    Tensor delta_targets = deltas;
    for (std::size_t r = 0; r < deltas.rows(); ++r) {
      for (std::size_t k = 0; k < state_dim_; ++k) {
        delta_targets(r, k) /= delta_norm_.scale(k);
      }
    }
    const Tensor reward_targets = reward_norm_.Normalize(reward_col);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto dyn_params = dynamics_.Parameters();
    const auto rew_params = reward_.Parameters();
    for (int epoch = 0; epoch < epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size(); start += minibatch) {
        const std::size_t end = std::min(order.size(), start + minibatch);
        std::span<const std::size_t> idx(order.data() + start, end - start);
        const Tensor x = numcore::GatherRows(inputs, idx);
        {
          numcore::Tape tape;
          auto pred = dynamics_.Forward(tape, tape.Constant(x));
          auto loss = numcore::ops::MeanSquaredError(
              pred, numcore::GatherRows(delta_targets, idx));
          numcore::ApplyAdam(dynamics_opt_, dyn_params, tape.Backward(loss));
        }
        {
          numcore::Tape tape;
          auto pred = reward_.Forward(tape, tape.Constant(x));
          auto loss = numcore::ops::MeanSquaredError(
              pred, numcore::GatherRows(reward_targets, idx));
          numcore::ApplyAdam(reward_opt_, rew_params, tape.Backward(loss));
        }
        ++stats.steps;
      }
    }
    const ModelErrors after = Evaluate(data);
    stats.delta_mse = after.delta_mse;
    stats.reward_mse = after.reward_mse;
    return stats;
  }

  void Export(const std::string& prefix,
              std::vector<numcore::NamedTensor>& out) const {
    numcore::ExportMlp(prefix + ".dynamics", dynamics_, out);
    numcore::ExportMlp(prefix + ".reward", reward_, out);
    out.push_back({prefix + ".input_norm", input_norm_.ToTensor()});
    out.push_back({prefix + ".delta_norm", delta_norm_.ToTensor()});
    out.push_back({prefix + ".reward_norm", reward_norm_.ToTensor()});
  }

  void Import(const std::string& prefix,
              std::span<const numcore::NamedTensor> items) {
    numcore::ImportMlp(prefix + ".dynamics", items, dynamics_);
    numcore::ImportMlp(prefix + ".reward", items, reward_);
    input_norm_ = RunningNormalizer::FromTensor(
        numcore::FindTensor(items, prefix + ".input_norm"));
    delta_norm_ = RunningNormalizer::FromTensor(
        numcore::FindTensor(items, prefix + ".delta_norm"));
    reward_norm_ = RunningNormalizer::FromTensor(
        numcore::FindTensor(items, prefix + ".reward_norm"));
  }

 private:
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  WorldModelConfig config_;
  Mlp dynamics_;
  Mlp reward_;
  RunningNormalizer input_norm_;
  RunningNormalizer delta_norm_;
  RunningNormalizer reward_norm_;
  numcore::AdamState dynamics_opt_;
  numcore::AdamState reward_opt_;
};

}  // namespace mbcredit::worldmodel

#endif  // MBCREDIT_WORLDMODEL_WORLD_MODEL_HPP_
