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
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mbcredit/credit/advantages.hpp"
#include "mbcredit/credit/evaluators.hpp"
#include "mbcredit/envkit/additive_team.hpp"
#include "mbcredit/envkit/chain_world.hpp"
#include "mbcredit/errors.hpp"
#include "../support/datasets.hpp"
#include "../support/oracles.hpp"

namespace mbcredit::credit {
namespace {

using coopgame::ZeroDefaults;

// v(s, a) given directly as a function of one state row and one flat action row.
class FnEvaluator : public RowEvaluator {
 public:
  using Fn = std::function<double(std::span<const double>, std::span<const double>)>;
  FnEvaluator(int n, Fn fn)
      : RowEvaluator(JointAction(n, std::vector<double>{0.0})), fn_(std::move(fn)) {}

  std::vector<double> EvaluateRows(const Tensor& s, const Tensor& a) const override {
    ++passes_;
    std::vector<double> out(s.rows());
    for (std::size_t r = 0; r < s.rows(); ++r) out[r] = fn_(s.row(r), a.row(r));
    return out;
  }
  mutable int passes_ = 0;

 private:
  Fn fn_;
};

// Agent 3 never matters.
double Interacting(std::span<const double> s, std::span<const double> a) {
  return s[0] * a[0] * a[1] + std::sin(a[2] + s[1]) + a[0] * a[0] - 0.5 * a[1] * a[2];
}

struct Batch {
  Tensor states;
  std::vector<JointAction> actions;
};

Batch RandomBatch(std::size_t T, int n, std::size_t sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Batch b{testing::RandomTensor(T, sd, rng), {}};
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t t = 0; t < T; ++t) {
    JointAction a(n);
    for (auto& ai : a) ai = {u(rng)};
    b.actions.push_back(a);
  }
  return b;
}

worldmodel::WorldModelConfig SmallModel() {
  worldmodel::WorldModelConfig c;
  c.dynamics_width = 16;
  c.dynamics_depth = 2;
  c.reward_width = 16;
  c.reward_depth = 2;
  return c;
}

TEST(ParseSemivalueTest, KnownAndRejected) {
  EXPECT_EQ(ParseSemivalue("shapley", 4).n, 4);
  EXPECT_NO_THROW(ParseSemivalue("fixed:0", 4));
  EXPECT_NO_THROW(ParseSemivalue("fixed:3", 4));
  EXPECT_THROW(ParseSemivalue("fixed:4", 4), ConfigError);
  EXPECT_THROW(ParseSemivalue("fixed:-1", 4), ConfigError);
  EXPECT_THROW(ParseSemivalue("fixed:2x", 4), ConfigError);
  EXPECT_THROW(ParseSemivalue("owen", 4), ConfigError);
}

class ModelEvaluatorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng = MakeStream(1, {});
    model_ = worldmodel::WorldModel(5, 3, SmallModel(), rng);
    critic_ = policy::Critic(5, policy::NetworkConfig{8, 2, 1e-3, 0.0}, rng);
    std::mt19937_64 data(2);
    s_ = testing::RandomTensor(7, 5, data);
    a_ = testing::RandomTensor(7, 3, data);
  }
  worldmodel::WorldModel model_;
  policy::Critic critic_;
  Tensor s_, a_;
};

TEST_F(ModelEvaluatorTest, MatchesModelAndCriticComposition) {
  ModelBasedEvaluator eval(model_, critic_, 0.9, ZeroDefaults(std::vector<std::size_t>(3, 1)));
  Tensor next;
  std::vector<double> r;
  model_.PredictBatch(s_, a_, &next, &r);
  const auto v = critic_.Values(next);
  const auto got = eval.EvaluateRows(s_, a_);
  for (std::size_t t = 0; t < 7; ++t) EXPECT_NEAR(got[t], r[t] + 0.9 * v[t], 1e-12);
}

TEST_F(ModelEvaluatorTest, ZeroGammaIsRewardOnly) {
  ModelBasedEvaluator eval(model_, critic_, 0.0, ZeroDefaults(std::vector<std::size_t>(3, 1)));
  std::vector<double> r;
  model_.PredictBatch(s_, a_, nullptr, &r);
  EXPECT_EQ(eval.EvaluateRows(s_, a_), r);
}

TEST_F(ModelEvaluatorTest, ZeroDynamicsQueriesCriticAtTheCurrentState) {
  model_.dynamics().ZeroParameters();
  ModelBasedEvaluator eval(model_, critic_, 0.5, ZeroDefaults(std::vector<std::size_t>(3, 1)));
  std::vector<double> r;
  model_.PredictBatch(s_, a_, nullptr, &r);
  const auto v = critic_.Values(s_);
  const auto got = eval.EvaluateRows(s_, a_);
  for (std::size_t t = 0; t < 7; ++t) EXPECT_NEAR(got[t], r[t] + 0.5 * v[t], 1e-12);
}

TEST_F(ModelEvaluatorTest, GrandCoalitionSeesTheRealActionAndNonMembersAreIgnored) {
  ModelBasedEvaluator eval(model_, critic_, 0.9, ZeroDefaults(std::vector<std::size_t>(3, 1)));
  const std::vector<double> state(s_.row(0).begin(), s_.row(0).end());
  const JointAction a = {{0.3}, {-0.7}, {0.9}};
  Tensor flat = Tensor::FromRows({{0.3, -0.7, 0.9}});
  EXPECT_NEAR(eval.Value(state, a, Coalition::Full(3)),
              eval.EvaluateRows(Tensor::Row(state), flat)[0], 1e-12);
  // Changing agent 1's action must not move coalitions without agent 1.
  JointAction b = a;
  b[1][0] = 0.2;
  for (std::uint64_t m = 0; m < 8; ++m) {
    const Coalition c(3, m);
    if (c.Contains(1)) continue;
    EXPECT_EQ(eval.Value(state, a, c), eval.Value(state, b, c));
  }
  EXPECT_THROW(ModelBasedEvaluator(model_, critic_, 0.9,
                                   ZeroDefaults(std::vector<std::size_t>(2, 1))),
               DimensionError);
}

TEST(QValueEvaluatorTest, ConcatenatesStateAndMaskedAction) {
  Rng rng = MakeStream(3, {});
  policy::QCritic q(2, 2, policy::NetworkConfig{8, 2, 1e-3, 0.0}, rng);
  QValueEvaluator eval(q, ZeroDefaults(std::vector<std::size_t>(2, 1)));
  const std::vector<double> s = {0.1, 0.2};
  const JointAction a = {{0.5}, {-0.5}};
  EXPECT_NEAR(eval.Value(s, a, Coalition(2, 0b01)),
              q.Values(Tensor::FromRows({{0.1, 0.2, 0.5, 0.0}}))[0], 1e-12);
}

TEST(PerAgentAdvantagesTest, ExactMatchesPermutationOracleAndDummyIsZero) {
  const Batch b = RandomBatch(5, 4, 2, 4);
  FnEvaluator eval(4, Interacting);
  const CreditResult r = PerAgentAdvantages(b.states, b.actions, eval,
                                            coopgame::ShapleySpec(4), 1, true, 0, 0);
  ASSERT_TRUE(r.exact);
  for (std::size_t t = 0; t < 5; ++t) {
    const auto oracle = testing::PermutationShapley(4, [&](std::uint64_t m) {
      return eval.Value(b.states.row(t), b.actions[t], Coalition(4, m));
    });
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(r.psi(t, i), oracle[i], 1e-12);
      sum += r.psi(t, i);
    }
    EXPECT_EQ(r.psi(t, 3), 0.0);
    const double full = eval.Value(b.states.row(t), b.actions[t], Coalition::Full(4));
    const double none = eval.Value(b.states.row(t), b.actions[t], Coalition(4, 0));
    EXPECT_NEAR(sum, full - none, 1e-12);
  }
}

TEST(PerAgentAdvantagesTest, DummyIsZeroUnderSampling) {
  const Batch b = RandomBatch(20, 4, 2, 5);
  FnEvaluator eval(4, Interacting);
  for (const char* id : {"shapley", "banzhaf", "fixed:2"}) {
    const CreditResult r = PerAgentAdvantages(b.states, b.actions, eval,
                                              ParseSemivalue(id, 4), 3, false, 1, 2);
    for (std::size_t t = 0; t < 20; ++t) EXPECT_EQ(r.psi(t, 3), 0.0) << id;
  }
}

TEST(PerAgentAdvantagesTest, LeaveOneOutIsExactWithOneSample) {
  const Batch b = RandomBatch(10, 4, 2, 6);
  FnEvaluator eval(4, Interacting);
  const auto loo = ParseSemivalue("loo", 4);
  const CreditResult mc = PerAgentAdvantages(b.states, b.actions, eval, loo, 1, false, 3, 0);
  const CreditResult ex = PerAgentAdvantages(b.states, b.actions, eval, loo, 1, true, 3, 0);
  for (std::size_t e = 0; e < mc.psi.size(); ++e) EXPECT_NEAR(mc.psi[e], ex.psi[e], 1e-12);
}

TEST(PerAgentAdvantagesTest, MonteCarloWithinThreeStandardErrorsOnChain) {
  envkit::ChainWorld env;
  const worldmodel::TransitionSet data = testing::RandomActionTransitions(env, 256, 7);
  Rng rng = MakeStream(7, {});
  worldmodel::WorldModel model(9, 4, SmallModel(), rng);
  model.Fit(data, 5, 64, rng);
  policy::Critic critic(9, policy::NetworkConfig{16, 2, 1e-3, 0.0}, rng);
  ModelBasedEvaluator eval(model, critic, 0.99, ZeroDefaults(env.spec().action_dims));
  const std::size_t T = 4;
  Tensor states = Tensor::Zeros(T, 9);
  std::vector<JointAction> actions;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < 9; ++j) states(t, j) = data.states(50 * t, j);
    JointAction a(4);
    for (int i = 0; i < 4; ++i) a[i] = {data.actions(50 * t, i)};
    actions.push_back(a);
  }
  const auto spec = coopgame::ShapleySpec(4);
  const CreditResult ex = PerAgentAdvantages(states, actions, eval, spec, 1, true, 0, 0);
  const CreditResult mc = PerAgentAdvantages(states, actions, eval, spec, 10000, false, 0, 0);
  int outside = 0;
  for (std::size_t e = 0; e < ex.psi.size(); ++e) {
    if (std::abs(mc.psi[e] - ex.psi[e]) > 3 * mc.std_error[e] + 1e-12) ++outside;
  }
  EXPECT_LE(outside, 1);
}

TEST(PerAgentAdvantagesTest, DeterministicAndIndependentOfChunking) {
  const Batch b = RandomBatch(12, 4, 2, 8);
  FnEvaluator eval(4, Interacting);
  const auto spec = coopgame::ShapleySpec(4);
  const CreditResult a = PerAgentAdvantages(b.states, b.actions, eval, spec, 4, false, 9, 3);
  const CreditResult c = PerAgentAdvantages(b.states, b.actions, eval, spec, 4, false, 9, 3, 5);
  EXPECT_EQ(a.psi, c.psi);
  EXPECT_EQ(a.coalitions, c.coalitions);
  const CreditResult d = PerAgentAdvantages(b.states, b.actions, eval, spec, 4, false, 9, 4);
  EXPECT_NE(a.coalitions, d.coalitions);
}

TEST(PerAgentAdvantagesTest, TimestepOrderDoesNotChangeExactCredit) {
  const Batch b = RandomBatch(6, 4, 2, 10);
  FnEvaluator eval(4, Interacting);
  Batch rev{Tensor::Zeros(6, 2), {}};
  for (std::size_t t = 0; t < 6; ++t) {
    rev.states(t, 0) = b.states(5 - t, 0);
    rev.states(t, 1) = b.states(5 - t, 1);
    rev.actions.push_back(b.actions[5 - t]);
  }
  const auto spec = coopgame::BanzhafSpec(4);
  const CreditResult x = PerAgentAdvantages(b.states, b.actions, eval, spec, 1, true, 0, 0);
  const CreditResult y = PerAgentAdvantages(rev.states, rev.actions, eval, spec, 1, true, 0, 0);
  for (std::size_t t = 0; t < 6; ++t) {
    for (int i = 0; i < 4; ++i) EXPECT_EQ(x.psi(t, i), y.psi(5 - t, i));
  }
}

TEST(PerAgentAdvantagesTest, ExactModeFallsBackAboveTenAgents) {
  const Batch b = RandomBatch(2, 11, 2, 11);
  FnEvaluator eval(11, Interacting);
  const CreditResult r = PerAgentAdvantages(b.states, b.actions, eval,
                                            coopgame::ShapleySpec(11), 2, true, 0, 0);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.coalitions.size(), 22u);
}

TEST(PerAgentAdvantagesTest, RecoversAdditiveTeamCreditFromFittedReward) {
  envkit::AdditiveTeam env = envkit::AdditiveTeam::Default();
  const worldmodel::TransitionSet data = testing::RandomActionTransitions(env, 1024, 12);
  Rng rng = MakeStream(12, {});
  worldmodel::WorldModelConfig cfg = SmallModel();
  cfg.reward_width = 64;
  worldmodel::WorldModel model(4, 4, cfg, rng);
  model.Fit(data, 300, 64, rng);
  policy::Critic critic(4, policy::NetworkConfig{}, rng);
  ModelBasedEvaluator eval(model, critic, 0.0, ZeroDefaults(env.spec().action_dims));
  const Batch b = RandomBatch(20, 4, 1, 13);
  Tensor states = Tensor::Zeros(20, 4);
  for (std::size_t t = 0; t < 20; ++t) {
    for (int i = 0; i < 4; ++i) states(t, i) = 0.5;
  }
  const CreditResult r = PerAgentAdvantages(states, b.actions, eval,
                                            coopgame::ShapleySpec(4), 1, true, 0, 0);
  double worst = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(r.psi(t, i) -
                                       env.ClosedFormCredit(i, b.actions[t][i][0])));
    }
  }
  EXPECT_LT(worst, 0.25);
}

TEST(SharedAdvantagesTest, IsGaeOnTheSharedReward) {
  policy::RolloutBatch batch;
  batch.rewards = {1.0, 0.5, -1.0};
  batch.values = {0.2, 0.1, 0.0};
  batch.dones = {0, 1, 0};
  batch.bootstrap_value = 0.3;
  EXPECT_EQ(SharedAdvantages(batch, 0.9, 0.8),
            policy::Gae(batch.rewards, batch.values, 0.3, batch.dones, 0.9, 0.8));
}

}  // namespace
}  // namespace mbcredit::credit
