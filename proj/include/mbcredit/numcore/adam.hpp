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

#ifndef MBCREDIT_NUMCORE_ADAM_HPP_
#define MBCREDIT_NUMCORE_ADAM_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/autodiff.hpp"
#include "mbcredit/numcore/tensor.hpp"

namespace mbcredit::numcore {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global-norm gradient clipping threshold; <= 0 disables clipping.
  double max_grad_norm = 0.0;
};

struct AdamState {
  AdamOptions options;
  std::int64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

inline double GlobalNorm(std::span<const Tensor> grads) {
  double sq = 0.0;
  for (const Tensor& g : grads) sq += g.matrix().squaredNorm();
  return std::sqrt(sq);
}

// One bias-corrected Adam update. Rejects the whole update (state and
// parameters untouched) if any gradient entry is non-finite.
inline void AdamStep(AdamState& state, std::span<Tensor* const> params,
                     std::span<const Tensor> grads) {
  MBCREDIT_CHECK_DIM(params.size() == grads.size(),
                     "AdamStep: parameter/gradient count mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    MBCREDIT_CHECK_DIM(params[k]->shape() == grads[k].shape(),
                       "AdamStep: gradient " + std::to_string(k) +
                           " has shape " + ShapeString(grads[k].shape()) +
                           ", parameter has " +
                           ShapeString(params[k]->shape()));
    if (!grads[k].AllFinite()) {
      throw DiagnosticsError("AdamStep: non-finite gradient in parameter " +
                             std::to_string(k) + " at step " +
                             std::to_string(state.step + 1));
    }
  }
  if (state.first_moment.empty()) {
    for (Tensor* p : params) {
      state.first_moment.emplace_back(p->shape(), 0.0);
      state.second_moment.emplace_back(p->shape(), 0.0);
    }
  }
  MBCREDIT_CHECK(state.first_moment.size() == params.size(),
                 "AdamStep: state was created for a different parameter set");

  const AdamOptions& o = state.options;
  double clip_scale = 1.0;
  if (o.max_grad_norm > 0.0) {
    const double norm = GlobalNorm(grads);
    if (norm > o.max_grad_norm) clip_scale = o.max_grad_norm / norm;
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(o.beta1, t);
  const double bc2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto m = state.first_moment[k].matrix().array();
    auto v = state.second_moment[k].matrix().array();
    auto g = grads[k].matrix().array() * clip_scale;
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.square();
    params[k]->matrix().array() -=
        o.learning_rate * (m / bc1) / ((v / bc2).sqrt() + o.epsilon);
  }
}

// Applies one Adam step to `params` using gradients looked up by address.
inline void ApplyAdam(AdamState& state, const std::vector<Tensor*>& params,
                      const Gradients& grads) {
  std::vector<Tensor> g;
  g.reserve(params.size());
  for (const Tensor* p : params) g.push_back(grads.Of(*p));
  AdamStep(state, params, g);
}

inline AdamState MakeAdam(double learning_rate, double max_grad_norm = 0.0) {
  AdamState s;
  s.options.learning_rate = learning_rate;
  s.options.max_grad_norm = max_grad_norm;
  return s;
}

}  // namespace mbcredit::numcore

#endif  // MBCREDIT_NUMCORE_ADAM_HPP_
