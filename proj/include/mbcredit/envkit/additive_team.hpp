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

#ifndef MBCREDIT_ENVKIT_ADDITIVE_TEAM_HPP_
#define MBCREDIT_ENVKIT_ADDITIVE_TEAM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mbcredit/envkit/environment.hpp"

namespace mbcredit::envkit {

// One-step game with reward sum_i w_i * (1 - (a_i - g_i)^2). Agent i observes
// its own target g_i. Every agent's credit is known in closed form, which
// makes this the reference game for credit-assignment checks.
class AdditiveTeam : public Environment {
 public:
  AdditiveTeam(std::vector<double> weights, std::vector<double> targets)
      : w_(std::move(weights)), g_(std::move(targets)) {
    MBCREDIT_CHECK(!w_.empty() && w_.size() == g_.size(),
                   "AdditiveTeam needs matching weights and targets");
    for (double w : w_) MBCREDIT_CHECK(w > 0.0, "weights must be positive");
    const int n = static_cast<int>(w_.size());
    spec_.n_agents = n;
    spec_.global_state_dim = w_.size();
    spec_.obs_dims.assign(n, 1);
    spec_.action_dims.assign(n, 1);
    spec_.max_episode_steps = 1;
  }

  // n = 4, w = (1, 2, 3, 4), g = 0.5 for every agent.
  static AdditiveTeam Default() {
    return AdditiveTeam({1.0, 2.0, 3.0, 4.0}, {0.5, 0.5, 0.5, 0.5});
  }

  std::string id() const override { return "additive"; }
  const EnvSpec& spec() const override { return spec_; }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& targets() const { return g_; }

  Observation Reset(std::uint64_t /*seed*/) override {
    Observation o;
    o.state = g_;
    o.per_agent_obs = SplitState(o.state, spec_.obs_dims);
    return o;
  }

  StepResult Step(const JointAction& joint_action) override {
    const JointAction a = ClampAction(joint_action, spec_);
    StepResult out;
    out.reward = Reward(a);
    out.next_state = g_;
    out.per_agent_obs = SplitState(out.next_state, spec_.obs_dims);
    out.done = true;
    return out;
  }

  double Reward(const JointAction& a) const {
    double r = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) {
      const double d = a[i][0] - g_[i];
      r += w_[i] * (1.0 - d * d);
    }
    return r;
  }

  // Marginal contribution of agent i playing a_i instead of the zero default;
  // identical for every coalition because the reward is additive.
  double ClosedFormCredit(int i, double a_i) const {
    const double d = a_i - g_[i];
    return w_[i] * ((1.0 - d * d) - (1.0 - g_[i] * g_[i]));
  }

 private:
  std::vector<double> w_;
  std::vector<double> g_;
  EnvSpec spec_;
};

}  // namespace mbcredit::envkit

#endif  // MBCREDIT_ENVKIT_ADDITIVE_TEAM_HPP_
