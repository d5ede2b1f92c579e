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

#include "pbd/chain.hpp"

#include <cmath>

#include <doctest.h>

#include "support/oracles.hpp"

using namespace pbd;

TEST_CASE("rate pairs") {
  CHECK(chain::rates(chain::BirthDeathParams(2, 0, 0), 3) ==
        std::pair<double, double>{2.0, 3.0});
  CHECK(chain::rates(chain::BirthDeathParams(1, 0.5, 0.1), 0) ==
        std::pair<double, double>{1.0, 0.0});
  const auto [birth, death] = chain::rates(chain::BirthDeathParams(1, 0.5, 0.1), 4);
  CHECK(birth == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(death == doctest::Approx(5.2).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(chain::BirthDeathParams(0, 0, 0));
  CHECK_THROWS(chain::BirthDeathParams(-1, 0, 0));
  CHECK_THROWS(chain::BirthDeathParams(4, 2, 0));  // b must stay below 1
  CHECK_THROWS(chain::BirthDeathParams(4, 1.0, 0));
  CHECK_THROWS(chain::BirthDeathParams(1, 0, -0.1));
}

TEST_CASE("stationary law reduces to the classical families") {
  const auto poisson = chain::stationary(chain::BirthDeathParams(2, 0, 0), 1e-14);
  CHECK(poisson.probs[0] == doctest::Approx(0.1353352832366127).epsilon(1e-13));
  const auto pois_pmf = oracles::poisson_pmf(2.0, 50);
  for (int k = 0; k <= 50; ++k) {
    const double got = k <= poisson.max_count() ? poisson.probs[k] : 0.0;
    CHECK(std::fabs(got - pois_pmf[k]) <= 1e-12);
  }

  const auto nb = chain::stationary(chain::BirthDeathParams(1, 0.5, 0), 1e-14);
  CHECK(nb.probs[0] == doctest::Approx(0.25).epsilon(1e-13));
  for (int k = 0; k <= nb.max_count() && k <= 50; ++k)
    CHECK(std::fabs(nb.probs[k] - (k + 1) * 0.25 * std::pow(0.5, k)) <= 1e-12);
}

TEST_CASE("stationary law matches the direct product formula") {
  const chain::BirthDeathParams params(1.125, 0, 0.1389);
  const auto dist = chain::stationary(params, 1e-13);
  const auto direct = oracles::stationary_by_products(params, 200);
  for (int k = 0; k <= dist.max_count(); ++k)
    CHECK(std::fabs(dist.probs[k] - direct[k]) <= 1e-12);
  CHECK(dist.tail_bound <= 1e-13);
}

TEST_CASE("stationary detailed balance and tail bound") {
  for (const auto& params :
       {chain::BirthDeathParams(0.3, 0, 0.5), chain::BirthDeathParams(3, 0.7, 0),
        chain::BirthDeathParams(0.05, 0.9, 0), chain::BirthDeathParams(8, 0.2, 0.01)}) {
    const auto dist = chain::stationary(params, 1e-12);
    CHECK(dist.tail_bound <= 1e-12);
    double total = 0;
    for (double p : dist.probs) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < dist.max_count(); ++k) {
      const double lhs = dist.probs[k] * params.birth_rate(k);
      const double rhs = dist.probs[k + 1] * params.death_rate(k + 1);
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(lhs, 1e-300));
    }
  }
}

TEST_CASE("total variation distance") {
  const auto p2 = chain::stationary(chain::BirthDeathParams(2, 0, 0), 1e-14);
  CHECK(chain::tv_distance(p2, p2) <= 1e-13);
  CHECK(chain::tv_distance(chain::point_mass(0), chain::point_mass(1)) == 1.0);

  const auto p25 = chain::stationary(chain::BirthDeathParams(2.5, 0, 0), 1e-14);
  const double expect =
      oracles::tv_by_half_l1(oracles::poisson_pmf(2.0, 200), oracles::poisson_pmf(2.5, 200));
  CHECK(chain::tv_distance(p2, p25) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("hitting time formulas") {
  const chain::BirthDeathParams params(2, 0, 0);
  const auto dist = chain::stationary(params, 1e-14);
  CHECK(chain::mean_hitting_time_up(params, dist, 0) == doctest::Approx(0.5).epsilon(1e-12));

  // Algebraic restatement: birth(k) * probs[k] * E tau_k^+ = F(k).
  for (int k = 0; k <= 8; ++k) {
    const double lhs =
        params.birth_rate(k) * dist.probs[k] * chain::mean_hitting_time_up(params, dist, k);
    CHECK(lhs == doctest::Approx(dist.cdf(k)).epsilon(1e-12));
  }
  // Upward passage times grow with the starting state above the mode.
  double prev = chain::mean_hitting_time_up(params, dist, 2);
  for (int k = 3; k <= 10; ++k) {
    const double cur = chain::mean_hitting_time_up(params, dist, k);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK_THROWS(chain::mean_hitting_time_down(params, dist, 0));
  CHECK_THROWS(chain::mean_hitting_time_up(params, dist, 4000));
}

TEST_CASE("hitting times match direct simulation") {
  const chain::BirthDeathParams params(2, 0, 0);
  const auto dist = chain::stationary(params, 1e-14);
  const auto up = oracles::mc_hitting_time_up(params, 3, 20000, 1234);
  CHECK(std::fabs(chain::mean_hitting_time_up(params, dist, 3) - up.mean) <=
        3 * up.stderr_);
  const auto down = oracles::mc_hitting_time_down(params, 6, 20000, 4321);
  CHECK(std::fabs(chain::mean_hitting_time_down(params, dist, 6) - down.mean) <=
        3 * down.stderr_ + dist.tail_bound);
}

TEST_CASE("initial-death counts: growth direction") {
  CHECK(chain::mean_deaths_before_up(chain::BirthDeathParams(2, 0, 0), 0) == 0.0);
  CHECK(chain::mean_deaths_before_up(chain::BirthDeathParams(2, 0, 0), 1) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (int m = 0; m <= 30; ++m) {
    const double v = chain::mean_deaths_before_up(chain::BirthDeathParams(1, 0.5, 0.2), m);
    CHECK(v >= 0.0);
    CHECK(v <= static_cast<double>(m));
  }
  const auto mc = oracles::mc_initial_deaths_before_up(chain::BirthDeathParams(1, 0.5, 0.2), 5,
                                                       40000, 777);
  CHECK(std::fabs(chain::mean_deaths_before_up(chain::BirthDeathParams(1, 0.5, 0.2), 5) -
                  mc.mean) <= 3 * mc.stderr_);
}

TEST_CASE("initial-death counts: decline direction brackets") {
  const chain::BirthDeathParams params(2, 0, 0.3);
  for (int m = 1; m <= 10; ++m) {
    const auto b = chain::mean_deaths_before_down(params, m, m + 40);
    CHECK(b.low <= b.high);
    CHECK(b.low >= 1.0 - 1e-12);
    CHECK(b.high <= static_cast<double>(m) + 1e-12);
  }
  const auto tight = chain::mean_deaths_before_down_auto(params, 3, 1e-11);
  CHECK(tight.width() <= 1e-11);
  const auto mc = oracles::mc_initial_deaths_before_down(params, 3, 40000, 999);
  CHECK(tight.low - 3 * mc.stderr_ <= mc.mean);
  CHECK(mc.mean <= tight.high + 3 * mc.stderr_);

  // Wider horizons never widen the bracket.
  const auto narrow = chain::mean_deaths_before_down(params, 3, 10);
  const auto wide = chain::mean_deaths_before_down(params, 3, 40);
  CHECK(wide.width() <= narrow.width() + 1e-15);
}

TEST_CASE("difference bounds") {
  CHECK(chain::first_difference_bound(chain::BirthDeathParams(10, 0, 0), 9) ==
        doctest::Approx(0.15).epsilon(1e-15));
  CHECK(chain::first_difference_bound(chain::BirthDeathParams(0.1, 0, 0), 0) == 1.0);
  CHECK(chain::first_difference_bound(chain::BirthDeathParams(4, 0.5, 0), 7) ==
        doctest::Approx(1.0 / (0.5 * 8)).epsilon(1e-15));

  CHECK(chain::second_difference_bound(chain::BirthDeathParams(5, 0, 0), 0) ==
        doctest::Approx(3.0).epsilon(1e-15));
  CHECK(chain::second_difference_bound(chain::BirthDeathParams(10, 0, 0), 9) ==
        doctest::Approx(0.7).epsilon(1e-15));
  // Decreasing in both arguments.
  CHECK(chain::second_difference_bound(chain::BirthDeathParams(10, 0, 0), 5) <
        chain::second_difference_bound(chain::BirthDeathParams(10, 0, 0), 4));
  CHECK(chain::second_difference_bound(chain::BirthDeathParams(11, 0, 0), 5) <
        chain::second_difference_bound(chain::BirthDeathParams(10, 0, 0), 5));
}

TEST_CASE("death-count bounds hold on a parameter grid") {
  for (const auto& params :
       {chain::BirthDeathParams(5, 0.5, 0), chain::BirthDeathParams(0.5, 0, 1),
        chain::BirthDeathParams(2, 0, 0), chain::BirthDeathParams(1.5, 0.3, 0.2)}) {
    CHECK(chain::death_count_bound_violations(params, 100).empty());
  }
  // At birth(m) == death(m) both strict branches are skipped; m = 2 with
  // a = 2, b = beta = 0 sits exactly on the boundary and must not misfire.
  CHECK(chain::death_count_bound_violations(chain::BirthDeathParams(2, 0, 0), 100).empty());
}

TEST_CASE("stationary error paths") {
  CHECK_THROWS(chain::stationary(chain::BirthDeathParams(1, 0, 0), 0.0));
  CHECK_THROWS(chain::stationary(chain::BirthDeathParams(1, 0, 0), 1e-12, 4));
}
