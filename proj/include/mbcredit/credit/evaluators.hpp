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

#ifndef MBCREDIT_CREDIT_EVALUATORS_HPP_
#define MBCREDIT_CREDIT_EVALUATORS_HPP_

#include <span>
#include <vector>

#include "mbcredit/coopgame/coalition.hpp"
#include "mbcredit/coopgame/evaluator.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/tensor.hpp"
#include "mbcredit/policy/networks.hpp"
#include "mbcredit/worldmodel/world_model.hpp"

namespace mbcredit::credit {

using coopgame::Coalition;
using coopgame::JointAction;
using numcore::Tensor;

// Coalition evaluator that scores rows of (state, masked flat joint action)
// in one batched pass.
class RowEvaluator : public coopgame::CoalitionEvaluator {
 public:
  explicit RowEvaluator(JointAction defaults) : defaults_(std::move(defaults)) {
    for (const auto& d : defaults_) joint_dim_ += d.size();
  }

  int num_agents() const override { return static_cast<int>(defaults_.size()); }
  const JointAction& default_action() const override { return defaults_; }
  std::size_t joint_action_dim() const { return joint_dim_; }

  // v for each row; `joint_actions` rows are already masked.
  virtual std::vector<double> EvaluateRows(const Tensor& states,
                                           const Tensor& joint_actions) const = 0;

  double Value(std::span<const double> state, const JointAction& action,
               const Coalition& coalition) const override {
    const Coalition c[1] = {coalition};
    return Values(state, action, c)[0];
  }

  std::vector<double> Values(std::span<const double> state,
                             const JointAction& action,
                             std::span<const Coalition> coalitions) const override {
    Tensor states = Tensor::Zeros(coalitions.size(), state.size());
    Tensor actions = Tensor::Zeros(coalitions.size(), joint_dim_);
    for (std::size_t r = 0; r < coalitions.size(); ++r) {
      std::copy(state.begin(), state.end(), states.row(r).begin());
      coopgame::MaskActionFlat(action, coalitions[r], defaults_, actions.row(r));
    }
    return EvaluateRows(states, actions);
  }

 private:
  JointAction defaults_;
  std::size_t joint_dim_ = 0;
};

// v^C(s, a) = f_r(s, ã) + gamma * V(s + f_s(s, ã)).
class ModelBasedEvaluator : public RowEvaluator {
 public:
  ModelBasedEvaluator(const worldmodel::WorldModel& model,
                      const policy::Critic& critic, double gamma,
                      JointAction defaults)
      : RowEvaluator(std::move(defaults)),
        model_(model),
        critic_(critic),
        gamma_(gamma) {
    MBCREDIT_CHECK_DIM(model.action_dim() == joint_action_dim(),
                       "world model action width differs from the defaults");
  }

  std::vector<double> EvaluateRows(const Tensor& states,
                                   const Tensor& joint_actions) const override {
    std::vector<double> rewards;
    if (gamma_ == 0.0) {
      model_.PredictBatch(states, joint_actions, nullptr, &rewards);
      return rewards;
    }
    Tensor next;
    model_.PredictBatch(states, joint_actions, &next, &rewards);
    const std::vector<double> v = critic_.Values(next);
    for (std::size_t r = 0; r < rewards.size(); ++r) rewards[r] += gamma_ * v[r];
    return rewards;
  }

 private:
  const worldmodel::WorldModel& model_;
  const policy::Critic& critic_;
  double gamma_;
};

// v^C(s, a) = Q(s, ã), model-free.
class QValueEvaluator : public RowEvaluator {
 public:
  QValueEvaluator(const policy::QCritic& q, JointAction defaults)
      : RowEvaluator(std::move(defaults)), q_(q) {}

  std::vector<double> EvaluateRows(const Tensor& states,
                                   const Tensor& joint_actions) const override {
    return q_.Values(numcore::ConcatCols(states, joint_actions));
  }

 private:
  const policy::QCritic& q_;
};

}  // namespace mbcredit::credit

#endif  // MBCREDIT_CREDIT_EVALUATORS_HPP_
