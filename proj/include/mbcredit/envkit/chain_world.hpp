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

#ifndef MBCREDIT_ENVKIT_CHAIN_WORLD_HPP_
#define MBCREDIT_ENVKIT_CHAIN_WORLD_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mbcredit/envkit/environment.hpp"
#include "mbcredit/numcore/rng.hpp"

namespace mbcredit::envkit {

// Planar chain of legged links riding on a root body that slides along x.
// Every joint carries one torque actuator (one agent) and swings a foot that
// touches the ground. Ground contact is anisotropic viscous drag: a foot
// sliding backwards relative to the ground meets `drag_backward`, sliding
// forwards meets `drag_forward`. Neighbouring joints are coupled by springs
// through the chain.
//
// Global state: [root velocity, theta_0, omega_0, ..., theta_{n-1}, omega_{n-1}].
// Agent 0 observes [root velocity, theta_0, omega_0]; agent j > 0 observes
// [theta_j, omega_j]. The root position is tracked but not observed.
struct ChainWorldParams {
  int n_links = 4;
  double dt = 0.05;
  int horizon = 200;
  double link_length = 1.0;
  double joint_inertia = 0.25;
  double torque_gain = 1.0;
  double joint_stiffness = 4.0;
  double joint_damping = 0.5;
  double chain_coupling = 0.5;
  double body_mass = 2.0;
  double body_drag = 0.2;
  double drag_backward = 1.0;
  double drag_forward = 0.1;
  double control_cost = 0.02;
  double reset_noise = 0.05;
};

class ChainWorld : public Environment {
 public:
  explicit ChainWorld(ChainWorldParams params = {}) : p_(params) {
    MBCREDIT_CHECK(p_.n_links >= 1, "ChainWorld needs at least one link");
    spec_.n_agents = p_.n_links;
    spec_.global_state_dim = 1 + 2 * static_cast<std::size_t>(p_.n_links);
    spec_.obs_dims.assign(p_.n_links, 2);
    spec_.obs_dims[0] = 3;
    spec_.action_dims.assign(p_.n_links, 1);
    spec_.max_episode_steps = p_.horizon;
    theta_.assign(p_.n_links, 0.0);
    omega_.assign(p_.n_links, 0.0);
  }

  std::string id() const override {
    return "chain" + std::to_string(p_.n_links);
  }
  const EnvSpec& spec() const override { return spec_; }
  const ChainWorldParams& params() const { return p_; }

  Observation Reset(std::uint64_t seed) override {
    Rng rng(SplitMix64(seed));
    std::uniform_real_distribution<double> u(-p_.reset_noise, p_.reset_noise);
    x_ = 0.0;
    v_ = 0.0;
    for (int j = 0; j < p_.n_links; ++j) {
      theta_[j] = u(rng);
      omega_[j] = u(rng);
    }
    steps_ = 0;
    return Observe();
  }

  // Places the chain in an explicit configuration (for tests and tooling).
  Observation SetState(double root_position, std::span<const double> state) {
    MBCREDIT_CHECK_DIM(state.size() == spec_.global_state_dim,
                       "ChainWorld state dimension");
    x_ = root_position;
    v_ = state[0];
    for (int j = 0; j < p_.n_links; ++j) {
      theta_[j] = state[1 + 2 * j];
      omega_[j] = state[2 + 2 * j];
    }
    steps_ = 0;
    return Observe();
  }

  StepResult Step(const JointAction& joint_action) override {
    const JointAction a = ClampAction(joint_action, spec_);
    const int n = p_.n_links;
    const double dt = p_.dt;

    // Joint accelerations from the pre-step configuration.
    std::vector<double> alpha(n);
    for (int j = 0; j < n; ++j) {
      double coupling = 0.0;
      if (j > 0) coupling += theta_[j - 1] - theta_[j];
      if (j + 1 < n) coupling += theta_[j + 1] - theta_[j];
      const double torque = p_.torque_gain * a[j][0] -
                            p_.joint_damping * omega_[j] -
                            p_.joint_stiffness * theta_[j] +
                            p_.chain_coupling * coupling;
      alpha[j] = torque / p_.joint_inertia;
    }
    // Semi-implicit Euler: velocities first, positions with new velocities.
    for (int j = 0; j < n; ++j) {
      omega_[j] += dt * alpha[j];
      theta_[j] += dt * omega_[j];
    }
    double ground = 0.0;
    for (int j = 0; j < n; ++j) {
      const double foot_v =
          v_ - p_.link_length * std::cos(theta_[j]) * omega_[j];
      const double c = foot_v < 0.0 ? p_.drag_backward : p_.drag_forward;
      ground -= c * foot_v;
    }
    const double accel = (ground - p_.body_drag * v_) / p_.body_mass;
    const double x_before = x_;
    v_ += dt * accel;
    x_ += dt * v_;
    ++steps_;

    StepResult out;
    Observation obs = Observe();
    out.next_state = std::move(obs.state);
    out.per_agent_obs = std::move(obs.per_agent_obs);
    const double forward = (x_ - x_before) / dt;
    const double control = p_.control_cost * SquaredActionNorm(a);
    out.reward = forward - control;
    out.done = steps_ >= p_.horizon;
    out.info["forward_velocity"] = forward;
    out.info["control_cost"] = control;
    out.info["x_position"] = x_;
    return out;
  }

  double root_position() const { return x_; }

  // Kinetic plus spring energy of the chain and the body.
  double Energy() const {
    double e = 0.5 * p_.body_mass * v_ * v_;
    for (int j = 0; j < p_.n_links; ++j) {
      e += 0.5 * p_.joint_inertia * omega_[j] * omega_[j] +
           0.5 * p_.joint_stiffness * theta_[j] * theta_[j];
      if (j + 1 < p_.n_links) {
        const double d = theta_[j + 1] - theta_[j];
        e += 0.5 * p_.chain_coupling * d * d;
      }
    }
    return e;
  }

 private:
  Observation Observe() const {
    Observation o;
    o.state.reserve(spec_.global_state_dim);
    o.state.push_back(v_);
    for (int j = 0; j < p_.n_links; ++j) {
      o.state.push_back(theta_[j]);
      o.state.push_back(omega_[j]);
    }
    o.per_agent_obs = SplitState(o.state, spec_.obs_dims);
    return o;
  }

  ChainWorldParams p_;
  EnvSpec spec_;
  double x_ = 0.0;
  double v_ = 0.0;
  std::vector<double> theta_;
  std::vector<double> omega_;
  int steps_ = 0;
};

}  // namespace mbcredit::envkit

#endif  // MBCREDIT_ENVKIT_CHAIN_WORLD_HPP_
