// Copyright 2026 The pbdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PBD_CHAIN_HPP_
#define PBD_CHAIN_HPP_

#include <cstdint>
#include <utility>
#include <vector>

namespace pbd::chain {

// Parameters of the polynomial birth-death chain with birth rate a + b*k and
// death rate k + beta*k*(k-1) in state k.
//   a    — immigration rate, a > 0
//   b    — per-particle birth rate, 0 <= b < 1
//   beta — per-ordered-pair kill rate, beta >= 0
struct BirthDeathParams {
  double a;
  double b;
  double beta;

  BirthDeathParams(double a_in, double b_in, double beta_in);

  double birth_rate(double k) const { return a + b * k; }
  double death_rate(double k) const { return k + beta * k * (k - 1.0); }
};

// (birth, death) rate pair in state k.
std::pair<double, double> rates(const BirthDeathParams& params, std::int64_t k);

// Truncated stationary distribution of the chain.  probs[k] is the stationary
// mass at k, normalized over the retained support 0..K; tail_bound is a
// rigorous upper bound on the stationary mass beyond K (relative to the total
// mass), so every entry over-estimates the exact value by at most a factor
// 1 + tail_bound.
struct CountDistribution {
  std::vector<double> probs;
  double tail_bound = 0;

  int max_count() const { return static_cast<int>(probs.size()) - 1; }
  double mean() const;
  double variance() const;
  // F(k): cumulative mass on 0..k.
  double cdf(int k) const;
  // Upper estimate of the mass on k..infinity (includes tail_bound).
  double upper_tail(int k) const;
};

// Builds the stationary distribution by detailed balance
// (w_{k+1} = w_k * birth(k) / death(k+1)), truncating once the remaining
// geometric-dominated tail is below tol * mass.  Throws if the support cap is
// exceeded, which signals pathological parameters.
CountDistribution stationary(const BirthDeathParams& params, double tol = 1e-12,
                             int hard_cap = 1000000);

// Point mass at a single count; handy for degenerate test inputs.
CountDistribution point_mass(int k);

// Upper estimate of the total variation distance: half L1 over the shared
// support plus half of both tail bounds.
double tv_distance(const CountDistribution& p, const CountDistribution& q);

// Expected first-passage time from k to k+1: F(k) / (birth(k) * probs[k]).
double mean_hitting_time_up(const BirthDeathParams& params,
                            const CountDistribution& dist, int k);

// Expected first-passage time from k to k-1 (k >= 1), with the truncation
// tail added to the numerator so the result is an upper estimate.
double mean_hitting_time_down(const BirthDeathParams& params,
                              const CountDistribution& dist, int k);

// Expected number of the m initial particles dead before the population first
// reaches m+1.  Forward recursion from the empty boundary; result in [0, m].
double mean_deaths_before_up(const BirthDeathParams& params, int m);

struct Bracket {
  double low = 0;
  double high = 0;
  double width() const { return high - low; }
  bool contains(double x) const { return low <= x && x <= high; }
};

// Expected number of the m initial particles dead before the population first
// reaches m-1 (m >= 1).  The backward recursion has no closed boundary, so the
// value is bracketed by running it from index `horizon` with the two extreme
// seeds 1 and horizon; the recursion is monotone in the seed, which makes the
// interval rigorous.
Bracket mean_deaths_before_down(const BirthDeathParams& params, int m, int horizon);

// Doubles the horizon until the bracket width is below tol.  Throws if the
// hard cap is reached first.
Bracket mean_deaths_before_down_auto(const BirthDeathParams& params, int m,
                                     double tol = 1e-10, int horizon_cap = 1 << 20);

// Bound on the first difference of the Stein solution for configurations of
// size n: min{ 1, 1/(2(n+1)) + 1/a, 1/((a ∧ b)(n+1)) }, the third branch
// dropping out when b = 0.
double first_difference_bound(const BirthDeathParams& params, std::int64_t n);

// Bound on the second difference: 2/(n+1) + 5/a.
double second_difference_bound(const BirthDeathParams& params, std::int64_t n);

struct DeathCountBoundViolation {
  int m = 0;
  char branch = '?';  // '+' for the growth branch, '-' for the decline branch
  double lhs = 0;
  double rhs = 0;
};

// Checks, for every m <= m_max, the applicable death-count inequality:
//   birth(m) > death(m):  1 + E[deaths before up]   <= birth/(birth-death)
//   death(m) > birth(m):  E[deaths before down]     <= death/(death-birth)
// States with birth(m) == death(m) are skipped (both branches are strict).
// Returns the violations found; an empty vector means all checks passed.
std::vector<DeathCountBoundViolation> death_count_bound_violations(
    const BirthDeathParams& params, int m_max);

}  // namespace pbd::chain

#endif  // PBD_CHAIN_HPP_
