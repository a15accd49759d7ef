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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mbcredit/envkit/additive_team.hpp"
#include "mbcredit/envkit/chain_world.hpp"
#include "mbcredit/envkit/linear_team.hpp"
#include "mbcredit/envkit/registry.hpp"
#include "mbcredit/errors.hpp"

namespace mbcredit::envkit {
namespace {

using coopgame::ZeroDefaults;

std::vector<double> Concat(const std::vector<std::vector<double>>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

JointAction RandomAction(const EnvSpec& spec, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  JointAction a;
  for (std::size_t d : spec.action_dims) {
    a.emplace_back(d);
    for (double& v : a.back()) v = normal(rng);
  }
  return a;
}

TEST(RegistryTest, KnownIdsBuildAndUnknownIsConfigError) {
  for (const auto& id : EnvironmentIds()) {
    auto env = MakeEnvironment(id);
    EXPECT_EQ(env->id(), id);
    const EnvSpec& s = env->spec();
    std::size_t obs_total = 0;
    for (std::size_t d : s.obs_dims) obs_total += d;
    EXPECT_EQ(obs_total, s.global_state_dim);
    EXPECT_EQ(static_cast<int>(s.action_dims.size()), s.n_agents);
  }
  EXPECT_EQ(MakeEnvironment("chain6")->spec().n_agents, 6);
  EXPECT_THROW(MakeEnvironment("ant"), ConfigError);
}

TEST(AdditiveTeamTest, RewardExamples) {
  AdditiveTeam env({1.0, 2.0}, {0.0, 0.0});
  env.Reset(0);
  StepResult r = env.Step({{0.0}, {0.0}});
  EXPECT_DOUBLE_EQ(r.reward, 3.0);
  EXPECT_TRUE(r.done);
  env.Reset(0);
  EXPECT_DOUBLE_EQ(env.Step({{1.0}, {0.0}}).reward, 2.0);
}

TEST(AdditiveTeamTest, ClosedFormCreditIsRewardDifference) {
  AdditiveTeam env = AdditiveTeam::Default();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    JointAction a = {{u(rng)}, {u(rng)}, {u(rng)}, {u(rng)}};
    for (int i = 0; i < 4; ++i) {
      JointAction without = a;
      without[i][0] = 0.0;
      EXPECT_NEAR(env.ClosedFormCredit(i, a[i][0]), env.Reward(a) - env.Reward(without),
                  1e-12);
    }
  }
}

TEST(AdditiveTeamTest, RejectsBadConstruction) {
  EXPECT_THROW(AdditiveTeam({1.0}, {0.0, 0.0}), ContractError);
  EXPECT_THROW(AdditiveTeam({-1.0}, {0.0}), ContractError);
}

TEST(LinearTeamTest, ResetIsFixedAndStepIsExactlyLinear) {
  LinearTeam env = LinearTeam::Default();
  const Observation o1 = env.Reset(1);
  const Observation o2 = env.Reset(12345);
  EXPECT_EQ(o1.state, o2.state);
  EXPECT_EQ(o1.state, (std::vector<double>{1.0, -0.5, 0.5, 0.25}));
  const JointAction a = {{0.3}, {-0.7}};
  const StepResult r = env.Step(a);
  const auto& A = env.A();
  const auto& B = env.B();
  const double flat_a[2] = {0.3, -0.7};
  for (std::size_t i = 0; i < 4; ++i) {
    double expected = 0.0;
    for (std::size_t k = 0; k < 4; ++k) expected += A(i, k) * o1.state[k];
    for (std::size_t k = 0; k < 2; ++k) expected += B(i, k) * flat_a[k];
    EXPECT_NEAR(r.next_state[i], expected, 1e-15);
  }
  double s2 = 0.0;
  for (double v : o1.state) s2 += v * v;
  EXPECT_NEAR(r.reward, -s2 - 0.1 * (0.09 + 0.49), 1e-12);
}

TEST(LinearTeamTest, EpisodeEndsAtHorizon) {
  LinearTeam env = LinearTeam::Default();
  env.Reset(0);
  int steps = 0;
  while (!env.Step({{0.0}, {0.0}}).done) ++steps;
  EXPECT_EQ(steps + 1, env.spec().max_episode_steps);
}

TEST(ChainWorldTest, SameSeedSameTrajectory) {
  for (const char* id : {"chain4", "chain6"}) {
    auto e1 = MakeEnvironment(id);
    auto e2 = MakeEnvironment(id);
    EXPECT_EQ(e1->Reset(9).state, e2->Reset(9).state);
    EXPECT_NE(e1->Reset(9).state, e1->Reset(10).state);
    e1->Reset(9);
    e2->Reset(9);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
      const JointAction a = RandomAction(e1->spec(), rng, 0.8);
      const StepResult r1 = e1->Step(a);
      const StepResult r2 = e2->Step(a);
      ASSERT_EQ(r1.next_state, r2.next_state);
      ASSERT_EQ(r1.reward, r2.reward);
      ASSERT_EQ(r1.done, r2.done);
    }
  }
}

TEST(ChainWorldTest, ObservationsTileTheState) {
  ChainWorld env;
  const Observation o = env.Reset(3);
  EXPECT_EQ(Concat(o.per_agent_obs), o.state);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const StepResult r = env.Step(RandomAction(env.spec(), rng, 1.0));
    EXPECT_EQ(Concat(r.per_agent_obs), r.next_state);
  }
}

TEST(ChainWorldTest, RestIsAnEquilibrium) {
  ChainWorldParams p;
  p.control_cost = 0.0;
  ChainWorld env(p);
  const std::vector<double> rest(env.spec().global_state_dim, 0.0);
  env.SetState(0.0, rest);
  for (int t = 0; t < 100; ++t) {
    const StepResult r = env.Step(ZeroDefaults(env.spec().action_dims));
    EXPECT_EQ(r.reward, 0.0);
    for (double v : r.next_state) EXPECT_LT(std::abs(v), 1e-12);
  }
  EXPECT_LT(std::abs(env.root_position()), 1e-12);
}

TEST(ChainWorldTest, ClampingIsIdempotent) {
  ChainWorld a, b;
  a.Reset(4);
  b.Reset(4);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const JointAction raw = RandomAction(a.spec(), rng, 3.0);
    const StepResult ra = a.Step(raw);
    const StepResult rb = b.Step(ClampAction(raw, b.spec()));
    ASSERT_EQ(ra.next_state, rb.next_state);
    ASSERT_EQ(ra.reward, rb.reward);
  }
}

TEST(ChainWorldTest, NanActionIsRejected) {
  ChainWorld env;
  env.Reset(0);
  JointAction a = ZeroDefaults(env.spec().action_dims);
  a[2][0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(env.Step(a), DiagnosticsError);
  JointAction short_action(3, std::vector<double>{0.0});
  EXPECT_THROW(env.Step(short_action), DimensionError);
}

TEST(ChainWorldTest, ZeroTorqueEnergyStaysBounded) {
  ChainWorldParams p;
  p.reset_noise = 0.5;
  ChainWorld env(p);
  env.Reset(11);
  const double e0 = env.Energy();
  double peak = e0;
  for (int t = 0; t < 2000; ++t) {
    env.Step(ZeroDefaults(env.spec().action_dims));
    peak = std::max(peak, env.Energy());
  }
  EXPECT_LT(peak, 2.0 * e0 + 1e-9);
  EXPECT_LT(env.Energy(), 1e-3 * e0);
}

TEST(ChainWorldTest, RewardIsForwardSpeedMinusControlCost) {
  ChainWorld env;
  env.Reset(6);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const double x0 = env.root_position();
    const JointAction a = RandomAction(env.spec(), rng, 0.5);
    const StepResult r = env.Step(a);
    const double forward = (env.root_position() - x0) / env.params().dt;
    EXPECT_NEAR(r.reward, forward - env.params().control_cost *
                                    SquaredActionNorm(ClampAction(a, env.spec())),
                1e-12);
    EXPECT_NEAR(r.info.at("forward_velocity"), forward, 1e-12);
  }
}

TEST(ChainWorldTest, EpisodeLengthIsTheHorizon) {
  ChainWorld env;
  env.Reset(0);
  int t = 1;
  while (!env.Step(ZeroDefaults(env.spec().action_dims)).done) ++t;
  EXPECT_EQ(t, 200);
}

TEST(ChainWorldTest, PhasedStrokesMoveForward) {
  // A joint that swings back fast and forward slowly makes net progress on
  // the anisotropic ground; a constant torque does not.
  ChainWorld env;
  env.Reset(0);
  double ret = 0.0;
  for (int t = 0; t < 200; ++t) ret += env.Step(ZeroDefaults(env.spec().action_dims)).reward;
  ChainWorld pumped;
  Observation o = pumped.Reset(0);
  double pumped_ret = 0.0;
  for (int t = 0; t < 200; ++t) {
    JointAction a(4);
    for (int j = 0; j < 4; ++j) {
      const double omega = o.state[2 + 2 * j];
      a[j] = {omega >= 0.0 ? 1.0 : -1.0};
    }
    const StepResult r = pumped.Step(a);
    pumped_ret += r.reward;
    o.state = r.next_state;
  }
  EXPECT_GT(pumped_ret, ret + 50.0);
}

}  // namespace
}  // namespace mbcredit::envkit
