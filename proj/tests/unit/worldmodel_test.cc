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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mbcredit/envkit/linear_team.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/checkpoint.hpp"
#include "mbcredit/worldmodel/normalizer.hpp"
#include "mbcredit/worldmodel/world_model.hpp"
#include "../support/datasets.hpp"
#include "../support/oracles.hpp"

namespace mbcredit::worldmodel {
namespace {

using numcore::Tensor;

WorldModelConfig Small() {
  WorldModelConfig c;
  c.dynamics_width = 32;
  c.dynamics_depth = 2;
  c.reward_width = 32;
  c.reward_depth = 2;
  return c;
}

TEST(NormalizerTest, MatchesBatchStatisticsAndRoundTrips) {
  std::mt19937_64 rng(1);
  const Tensor a = testing::RandomTensor(37, 3, rng, 5.0);
  const Tensor b = testing::RandomTensor(11, 3, rng, 0.1);
  RunningNormalizer norm(3);
  norm.Update(a);
  norm.Update(b);
  for (std::size_t k = 0; k < 3; ++k) {
    double mean = 0, sq = 0;
    for (const Tensor* t : {&a, &b}) {
      for (std::size_t r = 0; r < t->rows(); ++r) mean += (*t)(r, k);
    }
    mean /= 48;
    for (const Tensor* t : {&a, &b}) {
      for (std::size_t r = 0; r < t->rows(); ++r) sq += ((*t)(r, k) - mean) * ((*t)(r, k) - mean);
    }
    EXPECT_NEAR(norm.mean(k), mean, 1e-12);
    EXPECT_NEAR(norm.scale(k), std::sqrt(sq / 48), 1e-12);
  }
  const Tensor back = norm.Denormalize(norm.Normalize(a));
  for (std::size_t e = 0; e < a.size(); ++e) EXPECT_NEAR(back[e], a[e], 1e-12);
  const RunningNormalizer copy = RunningNormalizer::FromTensor(norm.ToTensor());
  EXPECT_EQ(copy.Normalize(a), norm.Normalize(a));
}

TEST(NormalizerTest, ConstantCoordinateHasUnitScale) {
  RunningNormalizer norm(1);
  norm.Update(Tensor::Filled(10, 1, 4.0));
  EXPECT_EQ(norm.scale(0), 1.0);
  EXPECT_EQ(norm.Normalize(0, 4.0), 0.0);
}

TEST(WorldModelTest, ZeroDynamicsReturnsTheInputState) {
  Rng rng = MakeStream(1, {});
  WorldModel model(4, 2, WorldModelConfig(), rng);
  envkit::LinearTeam env = envkit::LinearTeam::Default();
  const TransitionSet data = testing::RandomActionTransitions(env, 200, 3);
  model.Fit(data, 1, 64, rng);
  model.dynamics().ZeroParameters();
  model.reward().ZeroParameters();
  Tensor next;
  std::vector<double> rewards;
  model.PredictBatch(data.states, data.actions, &next, &rewards);
  EXPECT_EQ(next, data.states);
  double mean_r = 0.0;
  for (double r : data.rewards) mean_r += r;
  mean_r /= static_cast<double>(data.size());
  for (double r : rewards) EXPECT_NEAR(r, mean_r, 1e-12);
}

TEST(WorldModelTest, UnfittedZeroRewardNetPredictsZero) {
  Rng rng = MakeStream(2, {});
  WorldModel model(3, 1, Small(), rng);
  model.reward().ZeroParameters();
  const Prediction p = model.Predict(std::vector<double>{1, 2, 3}, std::vector<double>{0.5});
  EXPECT_EQ(p.reward, 0.0);
}

TEST(WorldModelTest, DimensionMismatchIsRejected) {
  Rng rng = MakeStream(3, {});
  WorldModel model(4, 2, Small(), rng);
  Tensor next;
  EXPECT_THROW(model.PredictBatch(Tensor::Zeros(2, 3), Tensor::Zeros(2, 2), &next, nullptr),
               DimensionError);
  EXPECT_THROW(model.PredictBatch(Tensor::Zeros(2, 4), Tensor::Zeros(2, 1), &next, nullptr),
               DimensionError);
  TransitionSet empty{Tensor::Zeros(0, 4), Tensor::Zeros(0, 2), Tensor::Zeros(0, 4), {}};
  EXPECT_THROW(model.Fit(empty, 1, 64, rng), ContractError);
}

TEST(WorldModelTest, StationaryDataLearnsZeroDelta) {
  std::mt19937_64 data_rng(4);
  const Tensor s = testing::RandomTensor(128, 3, data_rng);
  const Tensor a = testing::RandomTensor(128, 2, data_rng);
  TransitionSet data{s, a, s, std::vector<double>(128, 1.0)};
  Rng rng = MakeStream(4, {});
  WorldModel model(3, 2, Small(), rng);
  const FitStats stats = model.Fit(data, 1500, 64, rng);
  EXPECT_LT(stats.delta_mse, 1e-6);
  EXPECT_LT(stats.reward_mse, 1e-6);
}

TEST(WorldModelTest, TinyBatchTakesOneStepPerEpoch) {
  std::mt19937_64 data_rng(5);
  const Tensor s = testing::RandomTensor(10, 3, data_rng);
  const Tensor a = testing::RandomTensor(10, 1, data_rng);
  TransitionSet data{s, a, testing::RandomTensor(10, 3, data_rng), std::vector<double>(10, 0.5)};
  Rng rng = MakeStream(5, {});
  WorldModel model(3, 1, Small(), rng);
  EXPECT_EQ(model.Fit(data, 3, 64, rng).steps, 3);
}

TEST(WorldModelTest, LinearTeamHeldOutFit) {
  envkit::LinearTeam env = envkit::LinearTeam::Default();
  const TransitionSet train = testing::RandomActionTransitions(env, 500, 1);
  const TransitionSet test = testing::RandomActionTransitions(env, 500, 2);
  Rng rng = MakeStream(6, {});
  WorldModel model(4, 2, WorldModelConfig(), rng);
  const FitStats stats = model.Fit(train, 50, 64, rng);
  EXPECT_LT(stats.delta_mse, stats.delta_mse_before);
  const ModelErrors held_out = model.Evaluate(test);
  EXPECT_LT(held_out.delta_mse, 1e-3);
  EXPECT_LT(held_out.reward_mse, 1e-2);
  // ŝ against the exact linear map.
  Tensor next;
  model.PredictBatch(test.states, test.actions, &next, nullptr);
  double mse = 0.0;
  for (std::size_t r = 0; r < test.size(); ++r) {
    for (std::size_t i = 0; i < 4; ++i) {
      double exact = 0.0;
      for (std::size_t k = 0; k < 4; ++k) exact += env.A()(i, k) * test.states(r, k);
      for (std::size_t k = 0; k < 2; ++k) exact += env.B()(i, k) * test.actions(r, k);
      mse += (next(r, i) - exact) * (next(r, i) - exact);
    }
  }
  EXPECT_LT(mse / (4.0 * test.size()), 1e-3);
}

TEST(WorldModelTest, FittingReducesTrainingErrorAcrossSeeds) {
  envkit::LinearTeam env = envkit::LinearTeam::Default();
  int improved = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const TransitionSet data = testing::RandomActionTransitions(env, 128, 100 + seed);
    Rng rng = MakeStream(static_cast<std::uint64_t>(seed), {});
    WorldModel model(4, 2, Small(), rng);
    const FitStats s = model.Fit(data, 2, 64, rng);
    if (s.delta_mse <= s.delta_mse_before && s.reward_mse <= s.reward_mse_before) ++improved;
  }
  EXPECT_GE(improved, 19);
}

TEST(WorldModelTest, ExportImportReproducesPredictions) {
  envkit::LinearTeam env = envkit::LinearTeam::Default();
  const TransitionSet data = testing::RandomActionTransitions(env, 100, 9);
  Rng rng = MakeStream(7, {});
  WorldModel a(4, 2, Small(), rng);
  a.Fit(data, 2, 32, rng);
  std::vector<numcore::NamedTensor> items;
  a.Export("m", items);
  Rng other = MakeStream(8, {});
  WorldModel b(4, 2, Small(), other);
  b.Import("m", items);
  Tensor na, nb;
  std::vector<double> ra, rb;
  a.PredictBatch(data.states, data.actions, &na, &ra);
  b.PredictBatch(data.states, data.actions, &nb, &rb);
  EXPECT_EQ(na, nb);
  EXPECT_EQ(ra, rb);
}

}  // namespace
}  // namespace mbcredit::worldmodel
