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

#ifndef MBCREDIT_ENVKIT_ENVIRONMENT_HPP_
#define MBCREDIT_ENVKIT_ENVIRONMENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/coopgame/coalition.hpp"
#include "mbcredit/errors.hpp"

namespace mbcredit::envkit {

using coopgame::AgentAction;
using coopgame::JointAction;

struct EnvSpec {
  int n_agents = 0;
  std::size_t global_state_dim = 0;
  std::vector<std::size_t> obs_dims;
  std::vector<std::size_t> action_dims;
  int max_episode_steps = 0;

  std::size_t joint_action_dim() const {
    return std::accumulate(action_dims.begin(), action_dims.end(),
                           std::size_t{0});
  }
};

struct Observation {
  std::vector<double> state;
  std::vector<std::vector<double>> per_agent_obs;
};

struct StepResult {
  std::vector<double> next_state;
  std::vector<std::vector<double>> per_agent_obs;
  double reward = 0.0;
  bool done = false;
  std::map<std::string, double> info;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual const EnvSpec& spec() const = 0;
  virtual Observation Reset(std::uint64_t seed) = 0;
  virtual StepResult Step(const JointAction& joint_action) = 0;
};

// Local observation of each agent: consecutive slices of the global state.
inline std::vector<std::vector<double>> SplitState(
    std::span<const double> state, std::span<const std::size_t> obs_dims) {
  std::vector<std::vector<double>> out;
  std::size_t k = 0;
  for (std::size_t d : obs_dims) {
    out.emplace_back(state.begin() + static_cast<std::ptrdiff_t>(k),
                     state.begin() + static_cast<std::ptrdiff_t>(k + d));
    k += d;
  }
  return out;
}

inline std::vector<double> ConcatObs(
    const std::vector<std::vector<double>>& per_agent) {
  std::vector<double> out;
  for (const auto& o : per_agent) out.insert(out.end(), o.begin(), o.end());
  return out;
}

// Checks shape, rejects NaN, and clamps every coordinate to [-1, 1].
inline JointAction ClampAction(const JointAction& joint_action,
                               const EnvSpec& spec) {
  MBCREDIT_CHECK_DIM(static_cast<int>(joint_action.size()) == spec.n_agents,
                     "joint action has " + std::to_string(joint_action.size()) +
                         " agents, environment has " +
                         std::to_string(spec.n_agents));
  JointAction out = joint_action;
  for (std::size_t i = 0; i < out.size(); ++i) {
    MBCREDIT_CHECK_DIM(out[i].size() == spec.action_dims[i],
                       "agent " + std::to_string(i) + " action dimension");
    for (double& v : out[i]) {
      if (std::isnan(v)) {
        throw DiagnosticsError("NaN action for agent " + std::to_string(i));
      }
      v = std::clamp(v, -1.0, 1.0);
    }
  }
  return out;
}

inline double SquaredActionNorm(const JointAction& a) {
  double s = 0.0;
  for (const auto& ai : a) {
    for (double v : ai) s += v * v;
  }
  return s;
}

}  // namespace mbcredit::envkit

#endif  // MBCREDIT_ENVKIT_ENVIRONMENT_HPP_
