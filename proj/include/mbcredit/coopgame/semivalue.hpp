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

// Semivalues: psi^i = sum_c p_c * (average marginal contribution of i over
// coalitions of size c drawn from N \ {i}), for a distribution p over sizes.

#ifndef MBCREDIT_COOPGAME_SEMIVALUE_HPP_
#define MBCREDIT_COOPGAME_SEMIVALUE_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/coopgame/coalition.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/rng.hpp"

namespace mbcredit::coopgame {

inline constexpr int kEnumerationGuard = 20;

// Probability p[c] on coalition size c, c = 0..n-1.
struct SemivalueSpec {
  int n = 0;
  std::vector<double> p;

  void Validate() const {
    MBCREDIT_CHECK(n >= 1 && n <= kMaxAgents, "semivalue spec needs 1..64 agents");
    MBCREDIT_CHECK(static_cast<int>(p.size()) == n,
                   "semivalue spec needs one weight per coalition size");
    double total = 0.0;
    for (double w : p) {
      MBCREDIT_CHECK(w >= 0.0 && std::isfinite(w),
                     "semivalue weights must be finite and non-negative");
      total += w;
    }
    MBCREDIT_CHECK(std::abs(total - 1.0) <= 1e-12,
                   "semivalue weights must sum to 1");
  }
};

inline SemivalueSpec ShapleySpec(int n) {
  MBCREDIT_CHECK(n >= 1, "ShapleySpec needs n >= 1");
  return {n, std::vector<double>(n, 1.0 / n)};
}

// binom(n-1, c) / 2^(n-1), built by the ratio recurrence and renormalized.
inline SemivalueSpec BanzhafSpec(int n) {
  MBCREDIT_CHECK(n >= 1, "BanzhafSpec needs n >= 1");
  std::vector<double> p(n);
  p[0] = std::ldexp(1.0, -(n - 1));
  for (int c = 0; c + 1 < n; ++c) {
    p[c + 1] = p[c] * static_cast<double>(n - 1 - c) / static_cast<double>(c + 1);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& w : p) w /= total;
  return {n, std::move(p)};
}

inline SemivalueSpec FixedSizeSpec(int n, int c) {
  MBCREDIT_CHECK(n >= 1, "FixedSizeSpec needs n >= 1");
  MBCREDIT_CHECK(c >= 0 && c <= n - 1,
                 "fixed coalition size " + std::to_string(c) +
                     " outside [0, " + std::to_string(n - 1) + "]");
  std::vector<double> p(n, 0.0);
  p[c] = 1.0;
  return {n, std::move(p)};
}

// All mass on the coalition of everyone else.
inline SemivalueSpec LooSpec(int n) { return FixedSizeSpec(n, n - 1); }

// Number of size-k subsets of a set of size m, as a double.
inline double BinomialCoefficient(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * static_cast<double>(m - k + j) / j;
  return std::round(r);
}

// ---------------------------------------------------------------------------
// Game-level algorithms. A game is any callable double(const Coalition&).

template <typename Game>
double MarginalContribution(int i, const Coalition& c, const Game& v) {
  MBCREDIT_CHECK(!c.Contains(i), "marginal contribution of agent " +
                                     std::to_string(i) +
                                     " to a coalition that contains it");
  return v(c.With(i)) - v(c);
}

// Exact enumeration over the 2^(n-1) coalitions of N \ {i}.
template <typename Game>
double SemivalueExact(int i, const Game& v, const SemivalueSpec& spec) {
  spec.Validate();
  const int n = spec.n;
  if (n > kEnumerationGuard) {
    throw ContractError("SemivalueExact refuses n=" + std::to_string(n) +
                        " (> " + std::to_string(kEnumerationGuard) +
                        "); use SemivalueMc instead");
  }
  MBCREDIT_CHECK(i >= 0 && i < n, "agent out of range");
  std::vector<double> size_sum(n, 0.0);
  const std::uint64_t others = Coalition::FullMask(n) & ~(std::uint64_t{1} << i);
  // Enumerate submasks of `others` in increasing order.
  std::uint64_t sub = 0;
  while (true) {
    const Coalition c(n, sub);
    size_sum[std::popcount(sub)] += v(c.With(i)) - v(c);
    if (sub == others) break;
    sub = (sub - others) & others;
  }
  double psi = 0.0;
  for (int c = 0; c < n; ++c) {
    if (spec.p[c] == 0.0) continue;
    psi += spec.p[c] * size_sum[c] / BinomialCoefficient(n - 1, c);
  }
  return psi;
}

// Semivalues of every agent from one table of all 2^n coalition values,
// indexed by mask.
inline std::vector<double> SemivaluesFromTable(std::span<const double> table,
                                               const SemivalueSpec& spec) {
  spec.Validate();
  const int n = spec.n;
  MBCREDIT_CHECK(n <= kEnumerationGuard, "value table too large");
  MBCREDIT_CHECK_DIM(table.size() == (std::size_t{1} << n),
                     "value table must have 2^n entries");
  std::vector<double> psi(n, 0.0);
  std::vector<double> size_sum(n);
  for (int i = 0; i < n; ++i) {
    std::fill(size_sum.begin(), size_sum.end(), 0.0);
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t m = 0; m < table.size(); ++m) {
      if (m & bit) continue;
      size_sum[std::popcount(m)] += table[m | bit] - table[m];
    }
    for (int c = 0; c < n; ++c) {
      if (spec.p[c] == 0.0) continue;
      psi[i] += spec.p[c] * size_sum[c] / BinomialCoefficient(n - 1, c);
    }
  }
  return psi;
}

// Draws C ⊆ N \ {i}: size c ~ p, then a uniform size-c subset by a partial
// Fisher-Yates shuffle of the other agents.
inline Coalition SampleCoalition(int i, const SemivalueSpec& spec, Rng& rng) {
  const int n = spec.n;
  std::discrete_distribution<int> size_dist(spec.p.begin(), spec.p.end());
  const int c = size_dist(rng);
  std::vector<int> pool;
  pool.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j != i) pool.push_back(j);
  }
  std::uint64_t mask = 0;
  for (int k = 0; k < c; ++k) {
    std::uniform_int_distribution<int> pick(k, static_cast<int>(pool.size()) - 1);
    std::swap(pool[k], pool[pick(rng)]);
    mask |= std::uint64_t{1} << pool[k];
  }
  return Coalition(n, mask);
}

struct McEstimate {
  double mean = 0.0;
  // Sample standard deviation of the marginal contributions / sqrt(samples).
  double std_error = 0.0;
  int samples = 0;
};

inline McEstimate SummarizeSamples(std::span<const double> values) {
  McEstimate est;
  est.samples = static_cast<int>(values.size());
  if (values.empty()) return est;
  double sum = 0.0;
  for (double x : values) sum += x;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double x : values) sq += (x - est.mean) * (x - est.mean);
    const double var = sq / static_cast<double>(values.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return est;
}

// Monte-Carlo semivalue: mean marginal contribution over sampled coalitions,
// summed in draw order.
template <typename Game>
McEstimate SemivalueMc(int i, const Game& v, const SemivalueSpec& spec,
                       int num_samples, Rng& rng) {
  spec.Validate();
  MBCREDIT_CHECK(num_samples >= 1, "SemivalueMc needs at least one sample");
  MBCREDIT_CHECK(i >= 0 && i < spec.n, "agent out of range");
  std::vector<double> mc(num_samples);
  for (int m = 0; m < num_samples; ++m) {
    const Coalition c = SampleCoalition(i, spec, rng);
    mc[m] = v(c.With(i)) - v(c);
  }
  return SummarizeSamples(mc);
}

}  // namespace mbcredit::coopgame

#endif  // MBCREDIT_COOPGAME_SEMIVALUE_HPP_
