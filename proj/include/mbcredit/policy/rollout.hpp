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

#ifndef MBCREDIT_POLICY_ROLLOUT_HPP_
#define MBCREDIT_POLICY_ROLLOUT_HPP_

#include <cstdint>
#include <vector>

#include "mbcredit/coopgame/coalition.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/tensor.hpp"
#include "mbcredit/worldmodel/world_model.hpp"

namespace mbcredit::policy {

using coopgame::JointAction;
using numcore::Tensor;

// Trajectories collected with one set of policies. Row t of every array is
// timestep t; episodes are laid end to end and separated by `dones`.
struct RolloutBatch {
  int n_agents = 0;

  Tensor states;       // (T, state_dim)  s_t
  Tensor next_states;  // (T, state_dim)  s_{t+1} as returned by the env
  std::vector<Tensor> obs;              // per agent (T, obs_dim_i)
  std::vector<Tensor> actions;          // per agent (T, act_dim_i), executed
  std::vector<Tensor> sampled_actions;  // per agent, pre-clamp Gaussian draws
  std::vector<std::vector<double>> log_probs;  // per agent, behaviour policy
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;

  std::vector<double> values;  // V(s_t) under the critic that collected
  double bootstrap_value = 0.0;
  std::vector<double> returns;  // G_t

  // Undiscounted returns of the episodes that finished inside the batch.
  std::vector<double> episode_returns;

  std::size_t size() const { return rewards.size(); }

  JointAction joint_action(std::size_t t) const {
    JointAction a(n_agents);
    for (int i = 0; i < n_agents; ++i) {
      auto row = actions[i].row(t);
      a[i].assign(row.begin(), row.end());
    }
    return a;
  }

  // Executed joint actions flattened agent by agent: (T, sum act_dim_i).
  Tensor JointActions() const {
    std::size_t width = 0;
    for (const Tensor& a : actions) width += a.cols();
    Tensor out = Tensor::Zeros(size(), width);
    for (std::size_t t = 0; t < size(); ++t) {
      std::size_t k = 0;
      for (const Tensor& a : actions) {
        for (double v : a.row(t)) out(t, k++) = v;
      }
    }
    return out;
  }

  worldmodel::TransitionSet Transitions() const {
    return worldmodel::TransitionSet{states, JointActions(), next_states,
                                     rewards};
  }

  void Validate() const {
    const std::size_t n = size();
    MBCREDIT_CHECK_DIM(states.rows() == n && next_states.rows() == n &&
                           dones.size() == n,
                       "rollout arrays must share their length");
    MBCREDIT_CHECK_DIM(static_cast<int>(obs.size()) == n_agents &&
                           static_cast<int>(actions.size()) == n_agents &&
                           static_cast<int>(log_probs.size()) == n_agents,
                       "rollout needs one entry per agent");
  }
};

}  // namespace mbcredit::policy

#endif  // MBCREDIT_POLICY_ROLLOUT_HPP_
