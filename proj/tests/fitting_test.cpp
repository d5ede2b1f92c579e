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

#include "pbd/fitting.hpp"

#include <cmath>

#include <doctest.h>

using namespace pbd;

namespace {

models::CompoundPoissonModel cp41() {
  return models::CompoundPoissonModel(
      carrier::CarrierSpace::unit_interval(),
      {carrier::DiscreteMeasure({{0.2, 3.0}, {0.6, 1.0}}),
       carrier::DiscreteMeasure({{0.4, 1.0}})});
}

}  // namespace

TEST_CASE("equality of variance and mean gives a plain Poisson fit") {
  models::MomentSummary mom;
  mom.total_mean = 2.5;
  mom.variance = 2.5;
  mom.second_moment = 2.5 + 2.5 * 2.5;
  mom.second_factorial_total = mom.second_moment - mom.total_mean;
  const carrier::DiscreteMeasure lambda({{0.3, 1.0}, {0.7, 1.5}});
  const auto fit =
      fitting::fit_overdispersed(mom, lambda, carrier::CarrierSpace::unit_interval());
  CHECK(fit.spec.params.b == 0.0);
  CHECK(fit.spec.params.a == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fit.regime == fitting::Regime::overdispersed);
}

TEST_CASE("cluster-process fit hits the closed form") {
  const auto fit = fitting::fit_model(models::ModelSpec{cp41()});
  CHECK(fit.spec.params.b == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fit.spec.params.a == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(fit.spec.params.beta == 0.0);
  CHECK(fit.regime == fitting::Regime::overdispersed);
  CHECK(fit.spec.nu.is_probability(1e-12));
}

TEST_CASE("runs fit hits the closed form") {
  const auto fit = fitting::fit_model(models::ModelSpec{models::RunsModel(100, 2, 0.3)});
  CHECK(fit.spec.params.a == doctest::Approx(6.3 / 0.931).epsilon(1e-9));
  CHECK(fit.spec.params.b == doctest::Approx(0.231 / 0.931).epsilon(1e-9));
  CHECK(fit.regime == fitting::Regime::overdispersed);
}

TEST_CASE("indicator fit hits the corollary values") {
  const auto fit = fitting::fit_model(models::ModelSpec{models::BernoulliModel(10, 0.1)});
  CHECK(fit.regime == fitting::Regime::underdispersed);
  CHECK(fit.spec.params.beta == doctest::Approx(1.0 / (9 * 0.8)).epsilon(1e-12));
  CHECK(fit.spec.params.a == doctest::Approx(1.125).epsilon(1e-12));
  CHECK(fit.spec.params.b == 0.0);
  // Placement is uniform for equal probabilities.
  for (const auto& [x, w] : fit.spec.nu.atoms())
    CHECK(w == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("general-probability indicator fit matches the power-sum formula") {
  const std::vector<double> p{0.05, 0.1, 0.2, 0.15, 0.3};
  const auto fit = fitting::fit_model(models::ModelSpec{models::BernoulliModel(5, p)});
  double l1 = 0, l2 = 0, l3 = 0;
  for (double q : p) {
    l1 += q;
    l2 += q * q;
    l3 += q * q * q;
  }
  const double beta = l2 / (l1 * l1 - l2 - 2 * l1 * l2 + 2 * l3);
  CHECK(fit.spec.params.beta == doctest::Approx(beta).epsilon(1e-9));
  CHECK(fit.spec.params.a == doctest::Approx(l1 + beta * (l1 * l1 - l2)).epsilon(1e-9));
  CHECK(fit.spec.nu.is_probability(1e-12));
}

TEST_CASE("negative kill-rate inputs are rejected, never clamped") {
  CHECK_THROWS_AS(fitting::fit_model(models::ModelSpec{models::BernoulliModel(10, 0.6)}),
                  fitting::FitError);
  models::MomentSummary mom;
  mom.total_mean = 1.0;
  mom.variance = 2.0;  // overdispersed input to the underdispersed fitter
  mom.second_moment = 3.0;
  CHECK_THROWS_AS(fitting::fit_underdispersed(mom, carrier::DiscreteMeasure({{0.5, 1.0}}),
                                              carrier::DiscreteMeasure({{0.5, 1.0}}),
                                              carrier::CarrierSpace::unit_interval()),
                  fitting::FitError);
}

TEST_CASE("fitted count law reproduces mean and variance on the birth branch") {
  for (const auto model :
       {models::ModelSpec{cp41()}, models::ModelSpec{models::RunsModel(100, 2, 0.3)}}) {
    const auto mom = models::moments(model, 500, 3);
    const auto fit = fitting::fit_model(model);
    const auto pi = chain::stationary(fit.spec.params, 1e-14);
    CHECK(pi.mean() == doctest::Approx(mom.total_mean).epsilon(1e-9));
    CHECK(pi.variance() == doctest::Approx(mom.variance).epsilon(1e-9));
  }
}

TEST_CASE("dispersion routing is exhaustive and exclusive") {
  CHECK(fitting::fit_model(models::ModelSpec{models::BernoulliModel(10, 0.1)}).regime ==
        fitting::Regime::underdispersed);
  CHECK(fitting::fit_model(models::ModelSpec{models::RunsModel(100, 2, 0.3)}).regime ==
        fitting::Regime::overdispersed);
  CHECK(fitting::fit_model(models::ModelSpec{cp41()}).regime ==
        fitting::Regime::overdispersed);
}

TEST_CASE("poisson baseline") {
  const auto fit = fitting::fit_poisson(models::ModelSpec{models::BernoulliModel(8, 0.2)});
  CHECK(fit.spec.params.a == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(fit.spec.params.b == 0.0);
  CHECK(fit.spec.params.beta == 0.0);
  CHECK(fit.spec.nu.is_probability(1e-12));
}

TEST_CASE("underdispersed runs fit uses MC moments with propagated uncertainty") {
  const auto fit = fitting::fit_model(models::ModelSpec{models::RunsModel(20, 2, 0.75)});
  CHECK(fit.regime == fitting::Regime::underdispersed);
  CHECK(fit.spec.params.beta > 0);
  CHECK(fit.spec.params.b == 0.0);
  CHECK(fit.diagnostics.count("beta_stderr") == 1);
  CHECK(fit.diagnostics.at("beta_stderr") > 0);
  CHECK(fit.diagnostics.count("mc_moments") == 1);
  CHECK(fit.spec.nu.is_probability(1e-12));  // renormalized
  // The raw placement total is recorded and close to 1.
  CHECK(std::fabs(fit.diagnostics.at("nu_total_raw") - 1.0) <= 0.02);
}
