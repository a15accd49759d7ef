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

#ifndef MBCREDIT_COOPGAME_COALITION_HPP_
#define MBCREDIT_COOPGAME_COALITION_HPP_

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"

namespace mbcredit::coopgame {

inline constexpr int kMaxAgents = 64;

using AgentAction = std::vector<double>;
using JointAction = std::vector<AgentAction>;

// Subset of agents {0, ..., n-1} stored as a bitmask.
class Coalition {
 public:
  Coalition() = default;
  Coalition(int n, std::uint64_t mask) : n_(n), mask_(mask) {
    MBCREDIT_CHECK(n >= 0 && n <= kMaxAgents,
                   "coalition agent count must be in [0, 64]");
    MBCREDIT_CHECK((mask & ~FullMask(n)) == 0,
                   "coalition mask has bits above agent " +
                       std::to_string(n - 1));
  }

  static Coalition Empty(int n) { return Coalition(n, 0); }
  static Coalition Full(int n) { return Coalition(n, FullMask(n)); }
  static Coalition Of(int n, std::initializer_list<int> members) {
    std::uint64_t m = 0;
    for (int i : members) {
      MBCREDIT_CHECK(i >= 0 && i < n, "member out of range");
      m |= std::uint64_t{1} << i;
    }
    return Coalition(n, m);
  }

  int n() const { return n_; }
  std::uint64_t mask() const { return mask_; }
  int size() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }

  bool Contains(int i) const {
    CheckAgent(i);
    return (mask_ >> i) & 1U;
  }
  Coalition With(int i) const {
    CheckAgent(i);
    return Coalition(n_, mask_ | (std::uint64_t{1} << i));
  }
  Coalition Without(int i) const {
    CheckAgent(i);
    return Coalition(n_, mask_ & ~(std::uint64_t{1} << i));
  }
  Coalition Complement() const { return Coalition(n_, ~mask_ & FullMask(n_)); }

  std::vector<int> Members() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i) {
      if ((mask_ >> i) & 1U) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const Coalition&, const Coalition&) = default;

  static std::uint64_t FullMask(int n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }

 private:
  void CheckAgent(int i) const {
    MBCREDIT_CHECK(i >= 0 && i < n_, "agent " + std::to_string(i) +
                                         " out of range for n=" +
                                         std::to_string(n_));
  }

  int n_ = 0;
  std::uint64_t mask_ = 0;
};

// ã^i = a^i for members, defaults^i otherwise.
inline JointAction MaskAction(const JointAction& joint_action,
                              const Coalition& coalition,
                              const JointAction& defaults) {
  const int n = static_cast<int>(joint_action.size());
  MBCREDIT_CHECK(coalition.n() == n,
                 "coalition is over " + std::to_string(coalition.n()) +
                     " agents but the joint action has " + std::to_string(n));
  MBCREDIT_CHECK_DIM(defaults.size() == joint_action.size(),
                     "defaults must have one entry per agent");
  JointAction out;
  out.reserve(joint_action.size());
  for (int i = 0; i < n; ++i) {
    MBCREDIT_CHECK_DIM(joint_action[i].size() == defaults[i].size(),
                       "agent " + std::to_string(i) +
                           " action/default dimension mismatch");
    out.push_back(coalition.Contains(i) ? joint_action[i] : defaults[i]);
  }
  return out;
}

// Same as MaskAction but writes the flattened result into `out`.
inline void MaskActionFlat(const JointAction& joint_action,
                           const Coalition& coalition,
                           const JointAction& defaults,
                           std::span<double> out) {
  std::size_t k = 0;
  for (int i = 0; i < static_cast<int>(joint_action.size()); ++i) {
    const auto& src = coalition.Contains(i) ? joint_action[i] : defaults[i];
    for (double v : src) out[k++] = v;
  }
}

inline JointAction ZeroDefaults(std::span<const std::size_t> action_dims) {
  JointAction d;
  for (std::size_t dim : action_dims) d.emplace_back(dim, 0.0);
  return d;
}

}  // namespace mbcredit::coopgame

#endif  // MBCREDIT_COOPGAME_COALITION_HPP_
