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
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/adam.hpp"
#include "mbcredit/numcore/autodiff.hpp"
#include "mbcredit/numcore/checkpoint.hpp"
#include "mbcredit/numcore/mlp.hpp"
#include "mbcredit/numcore/rng.hpp"
#include "mbcredit/numcore/tensor.hpp"
#include "../support/oracles.hpp"

namespace mbcredit::numcore {
namespace {

namespace ops = numcore::ops;
using testing::RandomTensor;

TEST(TensorTest, ShapeMustMatchData) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), DimensionError);
  Tensor t({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t(1, 2), 6.0);
  EXPECT_THROW(t.item(), DimensionError);
}

TEST(TensorTest, GatherAndConcat) {
  const Tensor a = Tensor::FromRows({{1, 2}, {3, 4}, {5, 6}});
  const std::vector<std::size_t> idx = {2, 0};
  EXPECT_EQ(GatherRows(a, idx), Tensor::FromRows({{5, 6}, {1, 2}}));
  const Tensor b = Tensor::FromRows({{7}, {8}, {9}});
  EXPECT_EQ(ConcatCols(a, b), Tensor::FromRows({{1, 2, 7}, {3, 4, 8}, {5, 6, 9}}));
  EXPECT_THROW(ConcatCols(a, Tensor::Zeros(2, 1)), DimensionError);
}

TEST(MlpTest, ZeroParametersGiveZeroOutput) {
  Mlp net({3, 8, 8, 2}, Activation::kTanh, Activation::kIdentity);
  std::mt19937_64 rng(1);
  const Tensor out = net.Forward(RandomTensor(5, 3, rng));
  EXPECT_EQ(out, Tensor::Zeros(5, 2));
}

TEST(MlpTest, IdentityLayer) {
  Mlp net({3, 3}, Activation::kRelu, Activation::kIdentity);
  for (std::size_t k = 0; k < 3; ++k) net.weight(0)(k, k) = 1.0;
  const Tensor out = net.Forward(Tensor::FromRows({{1, 2, 3}}));
  EXPECT_EQ(out, Tensor::FromRows({{1, 2, 3}}));
}

TEST(MlpTest, TwoLayerTanhMatchesLoopOracle) {
  Rng rng = MakeStream(7, {1});
  Mlp net({4, 6, 3}, Activation::kTanh, Activation::kTanh, rng);
  std::mt19937_64 data_rng(2);
  const Tensor x = RandomTensor(5, 4, data_rng);
  const Tensor out = net.Forward(x);
  const auto oracle = testing::OracleForward(net, testing::ToRows(x));
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(out(r, j), oracle[r][j], 1e-12);
  }
  // The taped pass computes the same values.
  Tape tape;
  const Tensor taped = net.Forward(tape, tape.Constant(x)).value();
  for (std::size_t e = 0; e < out.size(); ++e) EXPECT_NEAR(taped[e], out[e], 1e-12);
}

TEST(MlpTest, WrongInputWidthIsDimensionError) {
  Mlp net({3, 4, 1}, Activation::kRelu, Activation::kIdentity);
  EXPECT_THROW(net.Forward(Tensor::Zeros(2, 4)), DimensionError);
  Tape tape;
  EXPECT_THROW(net.Forward(tape, tape.Constant(Tensor::Zeros(2, 2))), DimensionError);
}

TEST(MlpTest, InitializationBounds) {
  Rng rng = MakeStream(3, {});
  Mlp net({16, 32, 4}, Activation::kRelu, Activation::kIdentity, rng);
  const double b0 = 1.0 / std::sqrt(16.0), b1 = 1.0 / std::sqrt(32.0);
  for (double v : net.weight(0).vec()) EXPECT_LE(std::abs(v), b0);
  for (double v : net.bias(1).vec()) EXPECT_LE(std::abs(v), b1);
  EXPECT_EQ(net.NumParameters(), 16u * 32 + 32 + 32 * 4 + 4);
  EXPECT_TRUE(net.AllFinite());
}

TEST(AutodiffTest, SquareOfThree) {
  Tensor x = Tensor::Scalar(3.0);
  Tape tape;
  const Gradients g = tape.Backward(ops::Square(tape.Parameter(x)));
  EXPECT_DOUBLE_EQ(g.Of(x).item(), 6.0);
}

TEST(AutodiffTest, TanhAtZero) {
  Tensor x = Tensor::Scalar(0.0);
  Tape tape;
  const Gradients g = tape.Backward(ops::Tanh(tape.Parameter(x)));
  EXPECT_DOUBLE_EQ(g.Of(x).item(), 1.0);
}

TEST(AutodiffTest, NonScalarLossIsContractError) {
  Tensor x = Tensor::Zeros(2, 2);
  Tape tape;
  EXPECT_THROW(tape.Backward(tape.Parameter(x)), ContractError);
}

TEST(AutodiffTest, UnreachedParameterHasZeroGradient) {
  Tensor used = Tensor::Scalar(2.0);
  Tensor unused = Tensor::Filled(2, 3, 1.0);
  Tape tape;
  tape.Parameter(unused);
  const Gradients g = tape.Backward(ops::Square(tape.Parameter(used)));
  EXPECT_FALSE(g.Reached(unused));
  EXPECT_EQ(g.Of(unused), Tensor::Zeros(2, 3));
}

// Central-difference check of a scalar function of one parameter tensor.
template <typename F>
void ExpectGradient(Tensor& p, F build, double tol = 1e-6) {
  Tape tape;
  const Gradients g = tape.Backward(build(tape, tape.Parameter(p)));
  const Tensor analytic = g.Of(p);
  const double h = 1e-6;
  for (std::size_t e = 0; e < p.size(); ++e) {
    const double saved = p[e];
    p[e] = saved + h;
    Tape tp;
    const double lp = build(tp, tp.Parameter(p)).value().item();
    p[e] = saved - h;
    Tape tm;
    const double lm = build(tm, tm.Parameter(p)).value().item();
    p[e] = saved;
    EXPECT_NEAR(analytic[e], (lp - lm) / (2 * h), tol) << "entry " << e;
  }
}

TEST(AutodiffTest, ElementwiseOpGradients) {
  std::mt19937_64 rng(11);
  Tensor p = RandomTensor(3, 4, rng, 0.7);
  const Tensor c = RandomTensor(3, 4, rng, 0.7);
  const Tensor row = RandomTensor(1, 4, rng, 0.7);
  ExpectGradient(p, [&](Tape& t, Var x) {
    Var y = ops::Mul(ops::Exp(x), t.Constant(c));
    y = ops::Sub(ops::Add(y, ops::Tanh(x)), ops::Scale(ops::Square(x), 0.3));
    y = ops::AddRow(ops::MulRow(y, t.Constant(row)), t.Constant(row));
    return ops::Mean(ops::AddScalar(y, 2.0));
  });
  ExpectGradient(p, [&](Tape& t, Var x) {
    Var y = ops::Minimum(ops::Clip(x, -0.5, 0.5), ops::Mul(x, t.Constant(c)));
    return ops::Sum(ops::SumCols(ops::Relu(ops::AddScalar(y, 0.1))));
  });
}

TEST(AutodiffTest, MatMulGradients) {
  std::mt19937_64 rng(12);
  Tensor w = RandomTensor(4, 3, rng);
  const Tensor x = RandomTensor(5, 4, rng);
  ExpectGradient(w, [&](Tape& t, Var p) {
    return ops::MeanSquaredError(ops::MatMul(t.Constant(x), p), Tensor::Zeros(5, 3));
  });
  Tensor xs = x;
  const Tensor wc = RandomTensor(4, 3, rng);
  ExpectGradient(xs, [&](Tape& t, Var p) {
    return ops::Sum(ops::Tanh(ops::MatMul(p, t.Constant(wc))));
  });
}

TEST(AutodiffTest, RowBroadcastGradients) {
  std::mt19937_64 rng(13);
  Tensor b = RandomTensor(1, 3, rng);
  const Tensor x = RandomTensor(4, 3, rng);
  ExpectGradient(b, [&](Tape& t, Var p) {
    return ops::Sum(ops::Square(ops::MulRow(ops::AddRow(t.Constant(x), p), p)));
  });
}

TEST(AutodiffTest, ThreeLayerMlpMatchesFiniteDifferences) {
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    Rng rng = MakeStream(21, {static_cast<std::uint64_t>(act)});
    Mlp net({5, 16, 16, 16, 2}, act, Activation::kIdentity, rng);
    std::mt19937_64 data_rng(5);
    const Tensor x = RandomTensor(6, 5, data_rng);
    const Tensor y = RandomTensor(6, 2, data_rng);
    const auto res = testing::GradCheckMlp(net, x, y, 200, data_rng);
    EXPECT_GE(res.checked, 150);
    EXPECT_LT(res.max_rel_error, 1e-4) << ActivationName(act);
  }
}

TEST(AutodiffTest, BackwardIsLinearInTheLoss) {
  Rng rng = MakeStream(4, {});
  Mlp net({3, 8, 8, 2}, Activation::kTanh, Activation::kIdentity, rng);
  std::mt19937_64 data_rng(6);
  const Tensor x = RandomTensor(4, 3, data_rng);
  const Tensor y1 = RandomTensor(4, 2, data_rng);
  const Tensor y2 = RandomTensor(4, 2, data_rng);
  const double a = 0.7, b = -1.9;
  auto grads_of = [&](auto make_loss) {
    Tape tape;
    Var out = net.Forward(tape, tape.Constant(x));
    const Gradients g = tape.Backward(make_loss(out));
    std::vector<Tensor> all;
    for (const Tensor* p : std::as_const(net).Parameters()) all.push_back(g.Of(*p));
    return all;
  };
  const auto g1 = grads_of([&](Var o) { return ops::MeanSquaredError(o, y1); });
  const auto g2 = grads_of([&](Var o) { return ops::MeanSquaredError(o, y2); });
  const auto gc = grads_of([&](Var o) {
    return ops::Add(ops::Scale(ops::MeanSquaredError(o, y1), a),
                    ops::Scale(ops::MeanSquaredError(o, y2), b));
  });
  for (std::size_t k = 0; k < gc.size(); ++k) {
    for (std::size_t e = 0; e < gc[k].size(); ++e) {
      EXPECT_NEAR(gc[k][e], a * g1[k][e] + b * g2[k][e], 1e-12);
    }
  }
}

TEST(AutodiffTest, RepeatedPassesAreBitIdentical) {
  auto run = [] {
    Rng rng = MakeStream(99, {1, 2});
    Mlp net({7, 32, 32, 3}, Activation::kRelu, Activation::kIdentity, rng);
    std::mt19937_64 data_rng(3);
    const Tensor x = RandomTensor(64, 7, data_rng);
    Tape tape;
    Var out = net.Forward(tape, tape.Constant(x));
    const Gradients g = tape.Backward(ops::MeanSquaredError(out, Tensor::Zeros(64, 3)));
    std::vector<Tensor> r{out.value()};
    for (const Tensor* p : std::as_const(net).Parameters()) r.push_back(g.Of(*p));
    return r;
  };
  EXPECT_EQ(run(), run());
}

TEST(AdamTest, ZeroGradientLeavesParametersUnchanged) {
  Tensor p = Tensor::FromRows({{1.5, -2.0}});
  AdamState s = MakeAdam(1e-3);
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor::Zeros(1, 2)};
  for (int k = 0; k < 5; ++k) AdamStep(s, params, grads);
  EXPECT_EQ(p, Tensor::FromRows({{1.5, -2.0}}));
  EXPECT_EQ(s.step, 5);
}

TEST(AdamTest, FirstStepWithUnitGradientMovesByLearningRate) {
  Tensor p = Tensor::Filled(2, 2, 0.25);
  AdamState s = MakeAdam(1e-3);
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor::Filled(2, 2, 1.0)};
  AdamStep(s, params, grads);
  // m_hat = 1, v_hat = 1: the step is lr / (1 + eps).
  const double expected = 0.25 - 1e-3 / (1.0 + 1e-8);
  for (double v : p.vec()) EXPECT_NEAR(v, expected, 1e-15);
}

TEST(AdamTest, SecondStepClosedForm) {
  Tensor p = Tensor::Scalar(0.0);
  AdamState s = MakeAdam(0.01);
  std::vector<Tensor*> params{&p};
  AdamStep(s, params, std::vector<Tensor>{Tensor::Scalar(2.0)});
  AdamStep(s, params, std::vector<Tensor>{Tensor::Scalar(-1.0)});
  // Hand-rolled bias-corrected Adam.
  double m = 0, v = 0, x = 0;
  const double g[2] = {2.0, -1.0};
  for (int t = 1; t <= 2; ++t) {
    m = 0.9 * m + 0.1 * g[t - 1];
    v = 0.999 * v + 0.001 * g[t - 1] * g[t - 1];
    x -= 0.01 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
  }
  EXPECT_NEAR(p.item(), x, 1e-15);
}

TEST(AdamTest, IdenticalParametersStayIdentical) {
  Tensor a = Tensor::Filled(1, 3, 0.4), b = Tensor::Filled(1, 3, 0.4);
  AdamState s = MakeAdam(0.05);
  std::vector<Tensor*> params{&a, &b};
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const Tensor g = RandomTensor(1, 3, rng);
    AdamStep(s, params, std::vector<Tensor>{g, g});
  }
  EXPECT_EQ(a, b);
}

TEST(AdamTest, NanGradientIsRejectedWithoutSideEffects) {
  Tensor p = Tensor::FromRows({{1.0, 2.0}});
  AdamState s = MakeAdam(1e-3);
  std::vector<Tensor*> params{&p};
  AdamStep(s, params, std::vector<Tensor>{Tensor::Filled(1, 2, 0.5)});
  const Tensor before = p;
  const AdamState state_before = s;
  Tensor bad = Tensor::Filled(1, 2, 0.5);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(AdamStep(s, params, std::vector<Tensor>{bad}), DiagnosticsError);
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.step, state_before.step);
  EXPECT_EQ(s.first_moment, state_before.first_moment);
}

TEST(AdamTest, ShapeMismatchIsDimensionError) {
  Tensor p = Tensor::Zeros(2, 2);
  AdamState s = MakeAdam(1e-3);
  std::vector<Tensor*> params{&p};
  EXPECT_THROW(AdamStep(s, params, std::vector<Tensor>{Tensor::Zeros(1, 4)}),
               DimensionError);
}

TEST(AdamTest, GlobalNormClipping) {
  Tensor a = Tensor::Scalar(0.0), b = Tensor::Scalar(0.0);
  AdamState clipped = MakeAdam(1.0, 0.5);
  std::vector<Tensor*> params{&a, &b};
  // Clipping rescales g uniformly, which Adam's first step cancels; the
  // moments must still hold the clipped gradient.
  AdamStep(clipped, params, std::vector<Tensor>{Tensor::Scalar(3.0), Tensor::Scalar(4.0)});
  EXPECT_NEAR(clipped.first_moment[0].item(), 0.1 * 3.0 * 0.1, 1e-15);
  EXPECT_NEAR(clipped.first_moment[1].item(), 0.1 * 4.0 * 0.1, 1e-15);
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  std::mt19937_64 rng(8);
  Tensor weird = Tensor::FromRows({{1.0 / 3.0, -0.0, 5e-324, 1.7976931348623157e308}});
  std::vector<NamedTensor> items = {{"a", RandomTensor(3, 5, rng)}, {"weird", weird},
                                    {"empty", Tensor::Zeros(0, 4)}};
  std::stringstream ss;
  WriteTensors(ss, items);
  const auto back = ReadTensors(ss);
  ASSERT_EQ(back.size(), items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    EXPECT_EQ(back[k].name, items[k].name);
    EXPECT_EQ(back[k].tensor.shape(), items[k].tensor.shape());
    for (std::size_t e = 0; e < items[k].tensor.size(); ++e) {
      EXPECT_EQ(std::signbit(back[k].tensor[e]), std::signbit(items[k].tensor[e]));
      EXPECT_EQ(back[k].tensor[e], items[k].tensor[e]);
    }
  }
}

TEST(CheckpointTest, MlpExportImport) {
  Rng rng = MakeStream(5, {});
  Mlp a({4, 8, 2}, Activation::kTanh, Activation::kIdentity, rng);
  Mlp b({4, 8, 2}, Activation::kTanh, Activation::kIdentity);
  std::vector<NamedTensor> items;
  ExportMlp("net", a, items);
  ImportMlp("net", items, b);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_EQ(a.weight(l), b.weight(l));
    EXPECT_EQ(a.bias(l), b.bias(l));
  }
  Mlp wrong({4, 9, 2}, Activation::kTanh, Activation::kIdentity);
  EXPECT_THROW(ImportMlp("net", items, wrong), DimensionError);
  EXPECT_THROW(ImportMlp("other", items, b), ContractError);
}

TEST(CheckpointTest, RejectsForeignFiles) {
  std::stringstream bad("something else");
  EXPECT_ANY_THROW(ReadTensors(bad));
  std::stringstream future("mbcredit-params 99\ncount 0\n");
  EXPECT_ANY_THROW(ReadTensors(future));
}

TEST(RngTest, StreamsDependOnlyOnKeys) {
  EXPECT_EQ(DeriveSeed(1, {2, 3}), DeriveSeed(1, {2, 3}));
  EXPECT_NE(DeriveSeed(1, {2, 3}), DeriveSeed(1, {3, 2}));
  EXPECT_NE(DeriveSeed(1, {2}), DeriveSeed(2, {2}));
  EXPECT_NE(DeriveSeed(1, {}), DeriveSeed(1, {0}));
  Rng a = MakeStream(5, {Tag(StreamTag::kActor), 0});
  Rng b = MakeStream(5, {Tag(StreamTag::kActor), 0});
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a(), b());
}

}  // namespace
}  // namespace mbcredit::numcore
