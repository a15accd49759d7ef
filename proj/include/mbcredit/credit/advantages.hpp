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

#ifndef MBCREDIT_CREDIT_ADVANTAGES_HPP_
#define MBCREDIT_CREDIT_ADVANTAGES_HPP_

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/coopgame/semivalue.hpp"
#include "mbcredit/credit/evaluators.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/rng.hpp"
#include "mbcredit/policy/gae.hpp"
#include "mbcredit/policy/rollout.hpp"

namespace mbcredit::credit {

using coopgame::SemivalueSpec;

// Exact enumeration is only offered up to this many agents.
inline constexpr int kExactModeMaxAgents = 10;

enum class EvaluatorKind { kModelBased, kQCritic };

struct CreditConfig {
  std::string semivalue = "shapley";  // shapley | banzhaf | loo | fixed:<c>
  int samples_per_agent = 1;
  EvaluatorKind evaluator = EvaluatorKind::kModelBased;
  double gamma = 0.99;
  bool exact = false;
};

inline SemivalueSpec ParseSemivalue(const std::string& id, int n) {
  if (id == "shapley") return coopgame::ShapleySpec(n);
  if (id == "banzhaf") return coopgame::BanzhafSpec(n);
  if (id == "loo") return coopgame::LooSpec(n);
  if (id.rfind("fixed:", 0) == 0) {
    const std::string rest = id.substr(6);
    std::size_t used = 0;
    int c = -1;
    try {
      c = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) {
      throw ConfigError("bad fixed-size semivalue '" + id + "'");
    }
    if (c < 0 || c > n - 1) {
      throw ConfigError("fixed coalition size " + std::to_string(c) +
                        " outside [0, " + std::to_string(n - 1) + "]");
    }
    return coopgame::FixedSizeSpec(n, c);
  }
  throw ConfigError("unknown semivalue '" + id + "'");
}

struct CreditResult {
  Tensor psi;        // (T, n)
  Tensor std_error;  // (T, n); zero in exact mode
  // Sampled coalitions (masks over N \ {i}) for entry t * n + i, draw order.
  std::vector<std::vector<std::uint64_t>> coalitions;
  bool exact = false;
};

namespace internal {

// Per-timestep sorted list of distinct coalition masks.
inline std::size_t MaskSlot(const std::vector<std::uint64_t>& masks,
                            std::uint64_t m) {
  return static_cast<std::size_t>(
      std::lower_bound(masks.begin(), masks.end(), m) - masks.begin());
}

// Evaluates every (t, mask) pair, `chunk` rows per network pass.
inline std::vector<std::vector<double>> EvaluateMasks(
    const RowEvaluator& eval, const Tensor& states,
    const std::vector<JointAction>& actions,
    const std::vector<std::vector<std::uint64_t>>& masks, std::size_t chunk) {
  const int n = eval.num_agents();
  std::vector<std::vector<double>> values(masks.size());
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t t = 0; t < masks.size(); ++t) {
    values[t].resize(masks[t].size());
    for (std::size_t k = 0; k < masks[t].size(); ++k) slots.emplace_back(t, k);
  }
  for (std::size_t start = 0; start < slots.size(); start += chunk) {
    const std::size_t end = std::min(slots.size(), start + chunk);
    Tensor s = Tensor::Zeros(end - start, states.cols());
    Tensor a = Tensor::Zeros(end - start, eval.joint_action_dim());
    for (std::size_t r = start; r < end; ++r) {
      const auto [t, k] = slots[r];
      const auto src = states.row(t);
      std::copy(src.begin(), src.end(), s.row(r - start).begin());
      coopgame::MaskActionFlat(actions[t], coopgame::Coalition(n, masks[t][k]),
                               eval.default_action(), a.row(r - start));
    }
    const std::vector<double> v = eval.EvaluateRows(s, a);
    for (std::size_t r = start; r < end; ++r) {
      values[slots[r].first][slots[r].second] = v[r - start];
    }
  }
  return values;
}

}  // namespace internal

// Per-agent semivalue pseudo advantages psi[t][i] for every timestep.
// Monte-Carlo mode draws `samples_per_agent` coalitions for each (t, i) from
// an RNG stream keyed by (seed, iteration, t, i). Exact mode (n <= 10)
// enumerates all 2^n coalitions per timestep instead.
inline CreditResult PerAgentAdvantages(const Tensor& states,
                                       const std::vector<JointAction>& actions,
                                       const RowEvaluator& eval,
                                       const SemivalueSpec& spec,
                                       int samples_per_agent, bool exact,
                                       std::uint64_t seed,
                                       std::uint64_t iteration,
                                       std::size_t chunk = 4096) {
  spec.Validate();
  const int n = eval.num_agents();
  MBCREDIT_CHECK(spec.n == n, "semivalue spec agent count differs");
  MBCREDIT_CHECK(samples_per_agent >= 1, "need at least one coalition sample");
  MBCREDIT_CHECK_DIM(states.rows() == actions.size(),
                     "states and actions differ in length");
  const std::size_t T = actions.size();
  CreditResult out;
  out.psi = Tensor::Zeros(T, n);
  out.std_error = Tensor::Zeros(T, n);
  out.exact = exact && n <= kExactModeMaxAgents;

  std::vector<std::vector<std::uint64_t>> masks(T);
  if (out.exact) {
    const std::uint64_t total = std::uint64_t{1} << n;
    for (auto& m : masks) {
      m.resize(total);
      for (std::uint64_t k = 0; k < total; ++k) m[k] = k;
    }
    const auto values = internal::EvaluateMasks(eval, states, actions, masks, chunk);
    for (std::size_t t = 0; t < T; ++t) {
      const auto psi = coopgame::SemivaluesFromTable(values[t], spec);
      for (int i = 0; i < n; ++i) out.psi(t, i) = psi[i];
    }
    return out;
  }

  out.coalitions.assign(T * n, {});
  for (std::size_t t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      Rng rng = MakeStream(seed, {Tag(StreamTag::kCoalitions), iteration, t,
                                  static_cast<std::uint64_t>(i)});
      auto& drawn = out.coalitions[t * n + i];
      for (int m = 0; m < samples_per_agent; ++m) {
        const std::uint64_t c = coopgame::SampleCoalition(i, spec, rng).mask();
        drawn.push_back(c);
        masks[t].push_back(c);
        masks[t].push_back(c | (std::uint64_t{1} << i));
      }
    }
    std::sort(masks[t].begin(), masks[t].end());
    masks[t].erase(std::unique(masks[t].begin(), masks[t].end()), masks[t].end());
  }
  const auto values = internal::EvaluateMasks(eval, states, actions, masks, chunk);
  std::vector<double> mc(samples_per_agent);
  for (std::size_t t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      const auto& drawn = out.coalitions[t * n + i];
      for (int m = 0; m < samples_per_agent; ++m) {
        const std::uint64_t c = drawn[m];
        mc[m] = values[t][internal::MaskSlot(masks[t], c | (std::uint64_t{1} << i))] -
                values[t][internal::MaskSlot(masks[t], c)];
      }
      const auto est = coopgame::SummarizeSamples(mc);
      out.psi(t, i) = est.mean;
      out.std_error(t, i) = est.std_error;
    }
  }
  return out;
}

// Batch form of PerAgentAdvantages over a rollout.
inline CreditResult PerAgentAdvantages(const policy::RolloutBatch& batch,
                                       const CreditConfig& config,
                                       const RowEvaluator& eval,
                                       std::uint64_t seed,
                                       std::uint64_t iteration) {
  std::vector<JointAction> actions(batch.size());
  for (std::size_t t = 0; t < batch.size(); ++t) actions[t] = batch.joint_action(t);
  return PerAgentAdvantages(batch.states, actions, eval,
                            ParseSemivalue(config.semivalue, batch.n_agents),
                            config.samples_per_agent, config.exact, seed,
                            iteration);
}

// MAPPO baseline: one GAE advantage on the shared reward for every agent.
inline std::vector<double> SharedAdvantages(const policy::RolloutBatch& batch,
                                            double gamma, double lambda) {
  return policy::Gae(batch.rewards, batch.values, batch.bootstrap_value,
                     batch.dones, gamma, lambda);
}

}  // namespace mbcredit::credit

#endif  // MBCREDIT_CREDIT_ADVANTAGES_HPP_
