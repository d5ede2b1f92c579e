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

#include "pbd/sim.hpp"

#include <cmath>

#include <doctest.h>

#include "pbd/stats.hpp"
#include "support/oracles.hpp"

using namespace pbd;

namespace {

sim::PbdpSpec make_spec(double a, double b, double beta) {
  return sim::PbdpSpec(chain::BirthDeathParams(a, b, beta),
                       carrier::CarrierSpace::unit_interval(),
                       carrier::DiscreteMeasure({{0.25, 0.5}, {0.75, 0.5}}));
}

}  // namespace

TEST_CASE("count sampling follows the distribution") {
  rng::Stream rng(5);
  CHECK(sim::sample_count(chain::point_mass(3), rng) == 3);

  const auto dist = chain::stationary(chain::BirthDeathParams(2, 0, 0), 1e-13);
  const std::int64_t reps = 200000;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(dist.max_count()) + 1, 0);
  stats::KahanAccumulator sum;
  for (std::int64_t i = 0; i < reps; ++i) {
    const int k = sim::sample_count(dist, rng);
    ++counts[static_cast<std::size_t>(k)];
    sum.add(k);
  }
  const double mean = sum.sum() / static_cast<double>(reps);
  const double sigma = std::sqrt(2.0 / static_cast<double>(reps));
  CHECK(std::fabs(mean - 2.0) <= 3 * sigma);
  const auto gof = stats::chi_square_gof(counts, dist.probs, reps);
  CHECK(gof.pvalue >= 0.01);
}

TEST_CASE("pattern sampling") {
  const auto spec = make_spec(2, 0, 0);
  rng::Stream rng(6);
  CHECK(sim::sample_pbdp(spec, chain::point_mass(0), rng).empty());

  // Per-site occupation matches the placement weights.
  const sim::PbdpSampler sampler(spec);
  std::int64_t left = 0, total = 0;
  for (int i = 0; i < 50000; ++i) {
    rng::Stream s = rng::Stream::substream(17, static_cast<std::uint64_t>(i));
    const auto xi = sampler(s);
    total += xi.size();
    left += xi.count_at(0.25);
  }
  const double frac = static_cast<double>(left) / static_cast<double>(total);
  CHECK(std::fabs(frac - 0.5) <= 3.0 / std::sqrt(static_cast<double>(total)));
}

TEST_CASE("system simulation is replayable and ergodic") {
  const auto spec = make_spec(2, 0, 0);
  rng::Stream rng(77);
  const auto traj = sim::simulate_system(spec, carrier::PointPattern({0.25}), 500.0, rng);
  double prev = 0;
  for (const auto& ev : traj.events) {
    CHECK(ev.time > prev);
    prev = ev.time;
  }
  // Replay end state size: initial + births - deaths.
  int size = traj.initial.size();
  for (const auto& ev : traj.events)
    size += (ev.kind == sim::EventKind::immigration || ev.kind == sim::EventKind::birth) ? 1 : -1;
  CHECK(sim::pattern_at(traj, 500.0).size() == size);

  // Pure-immigration system occupies states like its stationary law.
  const auto occupancy = sim::occupation_distribution(traj, 500.0);
  const auto pi = chain::stationary(spec.params, 1e-12);
  CHECK(chain::tv_distance(occupancy, pi) <= 0.05);
}

TEST_CASE("coupled first-difference estimate") {
  const auto spec = make_spec(1.5, 0.3, 0.1);
  const carrier::PointPattern eta({0.25, 0.75});
  const auto space = spec.space;
  const carrier::PointPattern ref({0.25});
  const sim::PatternFn f = [&](const carrier::PointPattern& xi) {
    return carrier::d1(space, xi, ref);
  };

  // Identical insertion points couple the systems exactly.
  const auto zero = sim::estimate_first_difference(spec, eta, 0.4, 0.4, f, 500, 11);
  CHECK(zero.mean == 0.0);
  CHECK(zero.stderr_ == 0.0);

  // Constant test functions vanish under the difference.
  const sim::PatternFn constant = [](const carrier::PointPattern&) { return 0.37; };
  const auto flat = sim::estimate_first_difference(spec, eta, 0.25, 0.75, constant, 500, 12);
  CHECK(flat.mean == 0.0);

  // The bound from the chain module holds with margin.
  const auto est = sim::estimate_first_difference(spec, eta, 0.25, 0.75, f, 20000, 13);
  CHECK(std::fabs(est.mean) <=
        chain::first_difference_bound(spec.params, eta.size()) + 3 * est.stderr_);
}

TEST_CASE("survival fraction curve") {
  const auto spec = make_spec(2, 0, 0);
  const std::vector<double> times{0.0, 0.25, 1.0, 2.5};
  const auto curve = sim::survival_ratio_curve(spec, 4, times, 20000, 21);
  CHECK(curve[0].mean == 1.0);  // nothing has died at time zero
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double bound = sim::survival_ratio_bound(spec.params, 4, times[i]);
    CHECK(curve[i].mean <= bound + 3 * curve[i].stderr_ + 1e-12);
  }
  // With b = 0 the exponential branch is vacuous at any t.
  CHECK(sim::survival_ratio_bound(spec.params, 4, 1.0) ==
        doctest::Approx(1.0 / (1.0 + 0.25 * std::expm1(1.0))).epsilon(1e-12));
}

TEST_CASE("pure-immigration system matches the M/M/inf law") {
  // With b = beta = 0 the size process is an immigration-death queue whose
  // stationary law is the a-mean count distribution.
  const auto spec = make_spec(3, 0, 0);
  std::vector<std::int64_t> occupancy;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    rng::Stream rng = rng::Stream::substream(31, static_cast<std::uint64_t>(r));
    const auto traj = sim::simulate_system(spec, carrier::PointPattern(), 8.0, rng);
    const int size = sim::pattern_at(traj, 8.0).size();
    if (static_cast<std::size_t>(size) >= occupancy.size())
      occupancy.resize(static_cast<std::size_t>(size) + 1, 0);
    ++occupancy[static_cast<std::size_t>(size)];
  }
  const auto expect = oracles::poisson_pmf(3.0, static_cast<int>(occupancy.size()) - 1);
  const auto gof = stats::chi_square_gof(occupancy, expect, reps);
  CHECK(gof.pvalue >= 0.01);
}

TEST_CASE("long-run occupation matches the stationary law across parameters") {
  const std::vector<chain::BirthDeathParams> grid = {
      {0.5, 0, 0.4}, {2, 0.4, 0}, {4, 0.2, 0.05}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& params = grid[i];
    const sim::PbdpSpec spec(params, carrier::CarrierSpace::unit_interval(),
                             carrier::DiscreteMeasure({{0.5, 1.0}}));
    const double horizon = 1e4 / (params.a + 1.0);
    rng::Stream rng(5150 + 10 * i);
    const auto traj = sim::simulate_system(spec, carrier::PointPattern(), horizon, rng);
    const auto occupancy = sim::occupation_distribution(traj, horizon);
    const auto pi = chain::stationary(params, 1e-12);
    CHECK(chain::tv_distance(occupancy, pi) <= 0.02);
  }
}

TEST_CASE("sampled pattern counts pass goodness of fit against the count law") {
  const sim::PbdpSpec spec(chain::BirthDeathParams(1.5, 0.3, 0.02),
                           carrier::CarrierSpace::unit_interval(),
                           carrier::DiscreteMeasure({{0.25, 0.5}, {0.75, 0.5}}));
  const sim::PbdpSampler sampler(spec);
  const auto& dist = sampler.count_distribution();
  std::vector<std::int64_t> histogram(static_cast<std::size_t>(dist.max_count()) + 1, 0);
  const int reps = 60000;
  for (int r = 0; r < reps; ++r) {
    rng::Stream rng = rng::Stream::substream(6001, static_cast<std::uint64_t>(r));
    ++histogram[static_cast<std::size_t>(sampler(rng).size())];
  }
  CHECK(stats::chi_square_gof(histogram, dist.probs, reps).pvalue >= 0.01);
}
