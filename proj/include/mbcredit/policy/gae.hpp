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

#ifndef MBCREDIT_POLICY_GAE_HPP_
#define MBCREDIT_POLICY_GAE_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mbcredit/errors.hpp"

namespace mbcredit::policy {

// Generalized advantage estimation by reverse recursion:
//   delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
//   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// V_{T} is `bootstrap_value` (value of the state after the last stored step).
inline std::vector<double> Gae(std::span<const double> rewards,
                               std::span<const double> values,
                               double bootstrap_value,
                               std::span<const std::uint8_t> dones,
                               double gamma, double lambda) {
  const std::size_t n = rewards.size();
  MBCREDIT_CHECK_DIM(values.size() == n && dones.size() == n,
                     "GAE: rewards, values and dones must share their length");
  MBCREDIT_CHECK(gamma >= 0.0 && gamma <= 1.0 && lambda >= 0.0 && lambda <= 1.0,
                 "GAE: gamma and lambda must lie in [0, 1]");
  std::vector<double> adv(n);
  double next_adv = 0.0;
  double next_value = bootstrap_value;
  for (std::size_t k = n; k-- > 0;) {
    const double live = dones[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * next_value * live - values[k];
    next_adv = delta + gamma * lambda * live * next_adv;
    adv[k] = next_adv;
    next_value = values[k];
  }
  return adv;
}

// G_t = r_t + gamma * (1 - done_t) * G_{t+1}, with G_T = bootstrap_value.
inline std::vector<double> DiscountedReturns(std::span<const double> rewards,
                                             std::span<const std::uint8_t> dones,
                                             double bootstrap_value,
                                             double gamma) {
  MBCREDIT_CHECK_DIM(dones.size() == rewards.size(),
                     "returns: rewards and dones must share their length");
  std::vector<double> g(rewards.size());
  double next = bootstrap_value;
  for (std::size_t k = rewards.size(); k-- > 0;) {
    next = rewards[k] + gamma * (dones[k] ? 0.0 : next);
    g[k] = next;
  }
  return g;
}

// Zero mean, unit variance; a constant input maps to all zeros.
inline std::vector<double> Standardize(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  if (x.empty()) return out;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  const double sd = std::sqrt(var);
  for (double& v : out) v = (v - mean) / (sd + 1e-8);
  return out;
}

}  // namespace mbcredit::policy

#endif  // MBCREDIT_POLICY_GAE_HPP_
