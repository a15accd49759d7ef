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

#ifndef MBCREDIT_COOPGAME_EVALUATOR_HPP_
#define MBCREDIT_COOPGAME_EVALUATOR_HPP_

#include <span>
#include <vector>

#include "mbcredit/coopgame/coalition.hpp"
#include "mbcredit/coopgame/semivalue.hpp"

namespace mbcredit::coopgame {

// Characteristic function v^C(s, a): the value of joint action `a` at state
// `s` when agents outside C play their default actions. Implementations must
// be deterministic while their parameters are frozen.
class CoalitionEvaluator {
 public:
  virtual ~CoalitionEvaluator() = default;

  virtual int num_agents() const = 0;
  virtual const JointAction& default_action() const = 0;

  virtual double Value(std::span<const double> state, const JointAction& action,
                       const Coalition& coalition) const = 0;

  // Batched form; the default loops over Value.
  virtual std::vector<double> Values(std::span<const double> state,
                                     const JointAction& action,
                                     std::span<const Coalition> coalitions) const {
    std::vector<double> out;
    out.reserve(coalitions.size());
    for (const Coalition& c : coalitions) out.push_back(Value(state, action, c));
    return out;
  }
};

// Adapts an evaluator at a fixed (state, action) to the game interface.
class BoundGame {
 public:
  BoundGame(const CoalitionEvaluator& eval, std::span<const double> state,
            const JointAction& action)
      : eval_(eval), state_(state), action_(action) {}

  double operator()(const Coalition& c) const {
    return eval_.Value(state_, action_, c);
  }

 private:
  const CoalitionEvaluator& eval_;
  std::span<const double> state_;
  const JointAction& action_;
};

inline double MarginalContribution(int i, const Coalition& c,
                                   std::span<const double> state,
                                   const JointAction& action,
                                   const CoalitionEvaluator& eval) {
  return MarginalContribution(i, c, BoundGame(eval, state, action));
}

inline double SemivalueExact(int i, std::span<const double> state,
                             const JointAction& action,
                             const CoalitionEvaluator& eval,
                             const SemivalueSpec& spec) {
  return SemivalueExact(i, BoundGame(eval, state, action), spec);
}

inline McEstimate SemivalueMc(int i, std::span<const double> state,
                              const JointAction& action,
                              const CoalitionEvaluator& eval,
                              const SemivalueSpec& spec, int num_samples,
                              Rng& rng) {
  return SemivalueMc(i, BoundGame(eval, state, action), spec, num_samples, rng);
}

}  // namespace mbcredit::coopgame

#endif  // MBCREDIT_COOPGAME_EVALUATOR_HPP_
