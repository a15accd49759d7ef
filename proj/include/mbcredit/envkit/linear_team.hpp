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

#ifndef MBCREDIT_ENVKIT_LINEAR_TEAM_HPP_
#define MBCREDIT_ENVKIT_LINEAR_TEAM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mbcredit/envkit/environment.hpp"
#include "mbcredit/numcore/tensor.hpp"

namespace mbcredit::envkit {

// Noise-free linear system s' = A s + B a with reward -|s|^2 - 0.1 |a|^2.
// Agent i observes the i-th block of the state and drives the i-th action.
class LinearTeam : public Environment {
 public:
  LinearTeam(numcore::Tensor a, numcore::Tensor b, std::vector<double> s0,
             std::vector<std::size_t> obs_dims, int horizon)
      : a_(std::move(a)), b_(std::move(b)), s0_(std::move(s0)) {
    const std::size_t dim = s0_.size();
    MBCREDIT_CHECK_DIM(a_.rows() == dim && a_.cols() == dim,
                       "LinearTeam A must be square in the state dimension");
    MBCREDIT_CHECK_DIM(b_.rows() == dim, "LinearTeam B rows");
    std::size_t total = 0;
    for (std::size_t d : obs_dims) total += d;
    MBCREDIT_CHECK_DIM(total == dim, "observation blocks must tile the state");
    spec_.n_agents = static_cast<int>(obs_dims.size());
    spec_.global_state_dim = dim;
    spec_.obs_dims = std::move(obs_dims);
    MBCREDIT_CHECK_DIM(b_.cols() % spec_.obs_dims.size() == 0,
                       "B columns must split evenly across agents");
    spec_.action_dims.assign(spec_.obs_dims.size(),
                             b_.cols() / spec_.obs_dims.size());
    spec_.max_episode_steps = horizon;
    s_ = s0_;
  }

  // Two agents, 4-dimensional state, one action coordinate each.
  static LinearTeam Default() {
    auto a = numcore::Tensor::FromRows({{0.95, 0.10, 0.00, 0.02},
                                        {-0.10, 0.95, 0.03, 0.00},
                                        {0.00, 0.04, 0.90, 0.08},
                                        {0.05, 0.00, -0.08, 0.90}});
    auto b = numcore::Tensor::FromRows(
        {{0.10, 0.00}, {0.05, 0.02}, {0.00, 0.10}, {0.03, 0.06}});
    return LinearTeam(std::move(a), std::move(b), {1.0, -0.5, 0.5, 0.25},
                      {2, 2}, 50);
  }

  std::string id() const override { return "linear"; }
  const EnvSpec& spec() const override { return spec_; }
  const numcore::Tensor& A() const { return a_; }
  const numcore::Tensor& B() const { return b_; }

  Observation Reset(std::uint64_t /*seed*/) override {
    s_ = s0_;
    steps_ = 0;
    return Observe();
  }

  StepResult Step(const JointAction& joint_action) override {
    const JointAction act = ClampAction(joint_action, spec_);
    const std::vector<double> flat = ConcatObs(act);
    StepResult out;
    out.reward = Reward(s_, flat);
    out.next_state = Transition(s_, flat);
    s_ = out.next_state;
    ++steps_;
    out.per_agent_obs = SplitState(s_, spec_.obs_dims);
    out.done = steps_ >= spec_.max_episode_steps;
    return out;
  }

  std::vector<double> Transition(std::span<const double> s,
                                 std::span<const double> a) const {
    std::vector<double> next(s.size(), 0.0);
    for (std::size_t r = 0; r < s.size(); ++r) {
      for (std::size_t c = 0; c < s.size(); ++c) next[r] += a_(r, c) * s[c];
      for (std::size_t c = 0; c < a.size(); ++c) next[r] += b_(r, c) * a[c];
    }
    return next;
  }

  static double Reward(std::span<const double> s, std::span<const double> a) {
    double ss = 0.0, aa = 0.0;
    for (double v : s) ss += v * v;
    for (double v : a) aa += v * v;
    return -ss - 0.1 * aa;
  }

 private:
  Observation Observe() const {
    return Observation{s_, SplitState(s_, spec_.obs_dims)};
  }

  numcore::Tensor a_;
  numcore::Tensor b_;
  std::vector<double> s0_;
  std::vector<double> s_;
  EnvSpec spec_;
  int steps_ = 0;
};

}  // namespace mbcredit::envkit

#endif  // MBCREDIT_ENVKIT_LINEAR_TEAM_HPP_
