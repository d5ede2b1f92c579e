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

#include "pbd/models.hpp"

#include <cmath>

#include <doctest.h>

#include "pbd/parallel.hpp"
#include "pbd/stats.hpp"

using namespace pbd;

namespace {

models::CompoundPoissonModel cp41() {
  // Cluster masses |mu_1| = 4, |mu_2| = 1.
  return models::CompoundPoissonModel(
      carrier::CarrierSpace::unit_interval(),
      {carrier::DiscreteMeasure({{0.2, 3.0}, {0.6, 1.0}}),
       carrier::DiscreteMeasure({{0.4, 1.0}})});
}

}  // namespace

TEST_CASE("model validation") {
  CHECK_THROWS(models::BernoulliModel(3, 0.0));
  CHECK_THROWS(models::BernoulliModel(3, 1.0));
  CHECK_THROWS(models::BernoulliModel(0, 0.5));
  CHECK_THROWS(models::RunsModel(10, 1, 0.5));
  CHECK_THROWS(models::RunsModel(3, 4, 0.5));
  CHECK_THROWS(models::CompoundPoissonModel(carrier::CarrierSpace::unit_interval(),
                                            {carrier::DiscreteMeasure({{0.5, 0.0}})}));
}

TEST_CASE("sampling saturates when success is near-certain") {
  rng::Stream rng(1);
  const models::ModelSpec bern{models::BernoulliModel(6, 1.0 - 1e-12)};
  CHECK(models::sample(bern, rng).size() == 6);
  const models::ModelSpec runs{models::RunsModel(6, 2, 1.0 - 1e-12)};
  CHECK(models::sample(runs, rng).size() == 6);  // every cyclic window succeeds
}

TEST_CASE("closed-form moments") {
  const models::ModelSpec bern{models::BernoulliModel(10, 0.1)};
  const auto mb = models::moments(bern);
  CHECK(mb.total_mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mb.variance == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(mb.second_factorial_total ==
        doctest::Approx(mb.second_moment - mb.total_mean).epsilon(1e-12));
  CHECK(!mb.third_estimated);

  const models::ModelSpec runs{models::RunsModel(100, 2, 0.3)};
  const auto mr = models::moments(runs, 2000, 1);  // cheap MC only feeds the third moment
  CHECK(mr.total_mean == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(mr.variance == doctest::Approx(9.0 / 0.7 * 0.931).epsilon(1e-12));
  CHECK(mr.third_estimated);
  CHECK(mr.third_stderr > 0);

  const models::ModelSpec cp{cp41()};
  const auto mc = models::moments(cp);
  CHECK(mc.total_mean == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(mc.variance == doctest::Approx(8.0).epsilon(1e-12));
  // Third central moment: E(|Xi| - mean)^3 = 12.
  const double third_central = mc.third_moment - 3 * mc.total_mean * mc.variance -
                               mc.total_mean * mc.total_mean * mc.total_mean;
  CHECK(third_central == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("sampled counts match the closed-form moments") {
  const std::vector<models::ModelSpec> cases = {
      models::ModelSpec{models::BernoulliModel(10, 0.1)},
      models::ModelSpec{models::RunsModel(100, 2, 0.3)}, models::ModelSpec{cp41()}};
  for (const auto& model : cases) {
    const auto mom = models::moments(model, 2000, 3);
    const auto counts = parallel::map_replicates<double>(
        424242, 40000, [&](std::int64_t, rng::Stream& rng) {
          return static_cast<double>(models::sample(model, rng).size());
        });
    const auto mean = stats::summarize(counts);
    CHECK(std::fabs(mean.mean - mom.total_mean) <= 3 * mean.stderr_);
    std::vector<double> sq(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double d = counts[i] - mom.total_mean;
      sq[i] = d * d;
    }
    const auto var = stats::summarize(sq);
    CHECK(std::fabs(var.mean - mom.variance) <= 3 * var.stderr_);
  }
}

TEST_CASE("mean measures") {
  const models::ModelSpec bern{models::BernoulliModel(4, std::vector<double>{0.1, 0.2, 0.3, 0.4})};
  const auto lb = models::mean_measure(bern);
  CHECK(lb.mass_at(models::site_position(2, 4)) == doctest::Approx(0.2));
  CHECK(lb.total() == doctest::Approx(1.0).epsilon(1e-12));

  const models::ModelSpec runs{models::RunsModel(4, 2, 0.5)};
  const auto lr = models::mean_measure(runs);
  for (int i = 1; i <= 4; ++i)
    CHECK(lr.mass_at(models::site_position(i, 4)) == doctest::Approx(0.25).epsilon(1e-12));

  const models::ModelSpec cp{cp41()};
  CHECK(models::mean_measure(cp).total() ==
        doctest::Approx(models::moments(cp).total_mean).epsilon(1e-12));
}

TEST_CASE("pair-intensity site marginals") {
  const models::ModelSpec bern{models::BernoulliModel(2, 0.5)};
  const auto exact = models::second_factorial_site_marginal(bern, models::site_position(1, 2));
  CHECK(exact.exact);
  CHECK(exact.value == doctest::Approx(0.25).epsilon(1e-12));

  // Symmetric model: equal marginals across sites.
  const models::ModelSpec sym{models::BernoulliModel(5, 0.3)};
  const auto first = models::second_factorial_site_marginal(sym, models::site_position(1, 5));
  for (int i = 2; i <= 5; ++i)
    CHECK(models::second_factorial_site_marginal(sym, models::site_position(i, 5)).value ==
          doctest::Approx(first.value).epsilon(1e-12));

  // MC route agrees with the closed form.
  const models::ModelSpec big{models::BernoulliModel(6, 0.25)};
  const auto closed = models::second_factorial_site_marginal(big, models::site_position(3, 6));
  const models::ModelSpec runs{models::RunsModel(6, 2, 0.25)};
  const auto mc = models::second_factorial_site_marginal(runs, models::site_position(3, 6),
                                                         60000, 5);
  CHECK(!mc.exact);
  CHECK(mc.stderr_ > 0);
  // Same-quantity MC check against the Bernoulli closed form.
  struct Shim {
    static double mc_bernoulli(const models::ModelSpec& m, carrier::Point site) {
      const auto est = parallel::map_replicates<double>(909, 60000, [&](std::int64_t, rng::Stream& rng) {
        const auto xi = models::sample(m, rng);
        const double at = xi.count_at(site);
        return at * (xi.size() - at);
      });
      return stats::summarize(est).mean;
    }
  };
  const double mc_value = Shim::mc_bernoulli(big, models::site_position(3, 6));
  CHECK(std::fabs(mc_value - closed.value) <= 0.02);
}

TEST_CASE("reduced Palm samplers") {
  // Independent indicators: the Palm count law is the sum of the other n-1.
  const models::ModelSpec bern{models::BernoulliModel(8, 0.35)};
  const auto palm_counts = parallel::map_replicates<double>(
      6161, 40000, [&](std::int64_t, rng::Stream& rng) {
        return static_cast<double>(
            models::sample_palm(bern, models::site_position(4, 8), rng).size());
      });
  const auto pm = stats::summarize(palm_counts);
  CHECK(std::fabs(pm.mean - 7 * 0.35) <= 3 * pm.stderr_);

  // Palm draws at a forced-run site always existed before removal.
  const models::ModelSpec runs{models::RunsModel(10, 3, 0.4)};
  rng::Stream rng(77);
  for (int i = 0; i < 200; ++i) {
    const auto xi = models::sample_palm(runs, models::site_position(5, 10), rng);
    CHECK(xi.size() >= 0);
  }

  // Single-size clusters: the Palm process equals the process itself.
  const models::ModelSpec cp1{models::CompoundPoissonModel(
      carrier::CarrierSpace::unit_interval(),
      {carrier::DiscreteMeasure({{0.3, 1.5}, {0.7, 0.5}})})};
  const auto plain = parallel::map_replicates<double>(
      7272, 40000, [&](std::int64_t, rng::Stream& rng) {
        return static_cast<double>(models::sample(cp1, rng).size());
      });
  const auto palm = parallel::map_replicates<double>(
      7373, 40000, [&](std::int64_t, rng::Stream& rng) {
        return static_cast<double>(models::sample_palm(cp1, 0.3, rng).size());
      });
  const auto sp = stats::summarize(plain);
  const auto sq = stats::summarize(palm);
  CHECK(std::fabs(sp.mean - sq.mean) <= 3 * std::hypot(sp.stderr_, sq.stderr_));

  CHECK_THROWS(models::sample_palm(cp1, 0.123, rng));  // zero-intensity site
}

TEST_CASE("neighbourhoods") {
  const models::ModelSpec bern{models::BernoulliModel(10, 0.2)};
  const carrier::Point site = models::site_position(4, 10);
  const auto nb = models::neighbourhoods(bern, site);
  CHECK(nb.a_sites == std::vector<carrier::Point>{site});
  CHECK(nb.b_sites == std::vector<carrier::Point>{site});

  const models::ModelSpec runs{models::RunsModel(10, 2, 0.3)};
  const auto nr = models::neighbourhoods(runs, models::site_position(5, 10));
  CHECK(nr.a_sites == std::vector<carrier::Point>{models::site_position(4, 10),
                                                  models::site_position(5, 10),
                                                  models::site_position(6, 10)});
  CHECK(nr.b_sites.size() == 5);
  for (carrier::Point a : nr.a_sites)
    CHECK(std::find(nr.b_sites.begin(), nr.b_sites.end(), a) != nr.b_sites.end());

  // Cyclic wrap at the boundary.
  const auto wrap = models::neighbourhoods(runs, models::site_position(1, 10));
  CHECK(std::find(wrap.a_sites.begin(), wrap.a_sites.end(),
                  models::site_position(10, 10)) != wrap.a_sites.end());

  const models::ModelSpec cp{cp41()};
  const auto nc = models::neighbourhoods(cp, 0.2);
  CHECK(nc.a_sites == std::vector<carrier::Point>{0.2});
  CHECK(nc.b_sites == std::vector<carrier::Point>{0.2});
}

TEST_CASE("runs dispersion boundary") {
  // Variance >= mean exactly when the margin is nonnegative.
  for (const double p : {0.05, 0.2, 0.4, 0.6, 0.65, 0.7, 0.8, 0.9}) {
    const models::ModelSpec runs{models::RunsModel(60, 2, p)};
    const auto m = models::moments(runs, 500, 9);
    const double margin = models::runs_dispersion_margin(2, p);
    CHECK((m.variance >= m.total_mean) == (margin >= 0));
  }
}

TEST_CASE("binomial reduction of equal-probability indicators") {
  const models::ModelSpec bern{models::BernoulliModel(12, 0.25)};
  std::vector<std::int64_t> histogram(13, 0);
  const int reps = 60000;
  for (int r = 0; r < reps; ++r) {
    rng::Stream rng = rng::Stream::substream(818, static_cast<std::uint64_t>(r));
    ++histogram[static_cast<std::size_t>(models::sample(bern, rng).size())];
  }
  std::vector<double> binom(13);
  for (int k = 0; k <= 12; ++k)
    binom[static_cast<std::size_t>(k)] =
        std::exp(std::lgamma(13.0) - std::lgamma(k + 1.0) - std::lgamma(13.0 - k) +
                 k * std::log(0.25) + (12 - k) * std::log(0.75));
  const auto gof = stats::chi_square_gof(histogram, binom, reps);
  CHECK(gof.pvalue >= 0.01);
}
