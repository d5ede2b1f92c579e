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
#include <utility>
#include <vector>

namespace pbd::fitting {

namespace {

void check_against(const std::string& what, double got, double want, double tol = 1e-9) {
  if (std::fabs(got - want) > tol * std::max(1.0, std::fabs(want)))
    throw std::logic_error("fit cross-check failed for " + what + ": generic " +
                           std::to_string(got) + " vs closed form " + std::to_string(want));
}

}  // namespace

std::string regime_name(Regime regime) {
  return regime == Regime::overdispersed ? "overdispersed" : "underdispersed";
}

FitResult fit_overdispersed(const models::MomentSummary& moments,
                            const carrier::DiscreteMeasure& mean_measure,
                            const carrier::CarrierSpace& space) {
  if (!(moments.total_mean > 0))
    throw FitError("fit_overdispersed: mean total count must be positive");
  if (moments.variance < moments.total_mean)
    throw FitError("fit_overdispersed: input is underdispersed");
  const double b = (moments.variance - moments.total_mean) / moments.variance;
  const double a = (1.0 - b) * moments.total_mean;
  chain::BirthDeathParams params(a, b, 0.0);
  FitResult out{sim::PbdpSpec(params, space, mean_measure.normalized()),
                Regime::overdispersed,
                {}};
  out.diagnostics["a"] = a;
  out.diagnostics["b"] = b;
  out.diagnostics["beta"] = 0.0;
  out.diagnostics["dispersion_ratio"] = moments.variance / moments.total_mean;
  return out;
}

FitResult fit_underdispersed(const models::MomentSummary& moments,
                             const carrier::DiscreteMeasure& mean_measure,
                             const carrier::DiscreteMeasure& second_factorial_marginals,
                             const carrier::CarrierSpace& space,
                             double placement_tolerance) {
  if (!(moments.total_mean > 0))
    throw FitError("fit_underdispersed: mean total count must be positive");
  if (!(moments.variance < moments.total_mean))
    throw FitError("fit_underdispersed: input is not underdispersed");
  const double gap = moments.total_mean - moments.variance;
  const double denom =
      gap + moments.third_moment - (moments.total_mean + 1.0) * moments.second_moment;
  const double beta = gap / denom;
  if (!(beta >= 0) || !std::isfinite(beta))
    throw FitError("fit_underdispersed: kill-rate formula is negative (beta = " +
                   std::to_string(beta) + "); no fit exists for these moments");
  const double a = moments.total_mean + beta * (moments.second_moment - moments.total_mean);

  std::vector<std::pair<carrier::Point, double>> atoms;
  for (const auto& [x, lam] : mean_measure.atoms())
    atoms.emplace_back(x, (lam + beta * second_factorial_marginals.mass_at(x)) / a);
  carrier::DiscreteMeasure nu{std::move(atoms)};
  if (!nu.is_probability(placement_tolerance))
    throw FitError("fit_underdispersed: placement measure does not normalize (total " +
                   std::to_string(nu.total()) + "); marginals are inconsistent");
  chain::BirthDeathParams params(a, 0.0, beta);
  FitResult out{sim::PbdpSpec(params, space, nu.normalized()), Regime::underdispersed, {}};
  out.diagnostics["nu_total_raw"] = nu.total();
  out.diagnostics["a"] = a;
  out.diagnostics["b"] = 0.0;
  out.diagnostics["beta"] = beta;
  out.diagnostics["dispersion_ratio"] = moments.variance / moments.total_mean;
  return out;
}

FitResult fit_model(const models::ModelSpec& model) {
  const models::MomentSummary mom = models::moments(model);
  const carrier::DiscreteMeasure lambda = mean_measure(model);
  const carrier::CarrierSpace space = models::space_of(model);

  if (const auto* bern = std::get_if<models::BernoulliModel>(&model)) {
    std::vector<std::pair<carrier::Point, double>> marg;
    for (int i = 1; i <= bern->n; ++i) {
      const carrier::Point x = models::site_position(i, bern->n);
      marg.emplace_back(x, models::second_factorial_site_marginal(model, x).value);
    }
    FitResult fit = fit_underdispersed(mom, lambda, carrier::DiscreteMeasure(std::move(marg)),
                                       space);
    // Closed forms in terms of the power sums of the success probabilities.
    double l1 = 0, l2 = 0, l3 = 0;
    for (double q : bern->p) {
      l1 += q;
      l2 += q * q;
      l3 += q * q * q;
    }
    const double beta_closed = l2 / (l1 * l1 - l2 - 2 * l1 * l2 + 2 * l3);
    if (beta_closed >= 0) {
      check_against("beta", fit.diagnostics["beta"], beta_closed);
      check_against("a", fit.diagnostics["a"], l1 + beta_closed * (l1 * l1 - l2));
    }
    return fit;
  }

  if (const auto* runs = std::get_if<models::RunsModel>(&model)) {
    if (models::runs_dispersion_margin(runs->k, runs->p) >= 0) {
      FitResult fit = fit_overdispersed(mom, lambda, space);
      const double p = runs->p, n = runs->n;
      const double k = runs->k;
      const double denom =
          1 + p - (2 * k + 1) * std::pow(p, k) + (2 * k - 1) * std::pow(p, k + 1);
      check_against("a", fit.diagnostics["a"], (1 - p) * n * std::pow(p, k) / denom);
      check_against("b", fit.diagnostics["b"],
                    p * (2 - (2 * k + 1) * std::pow(p, k - 1) + (2 * k - 1) * std::pow(p, k)) /
                        denom);
      return fit;
    }
    // Underdispersed runs: the third moment and pair marginals are MC
    // estimates; all sites are exchangeable so one marginal serves for all.
    const models::SiteMarginal marginal =
        models::second_factorial_site_marginal(model, models::site_position(1, runs->n));
    std::vector<std::pair<carrier::Point, double>> marg;
    for (int i = 1; i <= runs->n; ++i)
      marg.emplace_back(models::site_position(i, runs->n), marginal.value);
    // Both the third moment and the marginals are MC estimates, so the
    // placement total carries their sampling noise.
    FitResult fit = fit_underdispersed(mom, lambda, carrier::DiscreteMeasure(std::move(marg)),
                                       space, 0.02);
    // Delta-method propagation of the MC third-moment error into beta and a.
    const double gap = mom.total_mean - mom.variance;
    const double denom =
        gap + mom.third_moment - (mom.total_mean + 1.0) * mom.second_moment;
    const double dbeta_dm3 = -gap / (denom * denom);
    const double beta_stderr = std::fabs(dbeta_dm3) * mom.third_stderr;
    fit.diagnostics["beta_stderr"] = beta_stderr;
    fit.diagnostics["a_stderr"] =
        std::fabs(mom.second_moment - mom.total_mean) * beta_stderr;
    fit.diagnostics["mc_moments"] = 1.0;
    return fit;
  }

  const auto& cp = std::get<models::CompoundPoissonModel>(model);
  FitResult fit = fit_overdispersed(mom, lambda, space);
  double s1 = 0, s2 = 0, srise = 0;
  for (std::size_t j = 0; j < cp.mus.size(); ++j) {
    const double s = static_cast<double>(j + 1);
    s1 += s * cp.mus[j].total();
    s2 += s * s * cp.mus[j].total();
    srise += s * (s - 1.0) * cp.mus[j].total();
  }
  check_against("b", fit.diagnostics["b"], srise / s2);
  check_against("a", fit.diagnostics["a"], s1 * s1 / s2);
  return fit;
}

FitResult fit_poisson(const models::ModelSpec& model) {
  const models::MomentSummary mom = models::moments(model);
  const carrier::DiscreteMeasure lambda = mean_measure(model);
  chain::BirthDeathParams params(mom.total_mean, 0.0, 0.0);
  FitResult out{sim::PbdpSpec(params, models::space_of(model), lambda.normalized()),
                Regime::overdispersed,
                {}};
  out.diagnostics["a"] = mom.total_mean;
  out.diagnostics["b"] = 0.0;
  out.diagnostics["beta"] = 0.0;
  out.diagnostics["dispersion_ratio"] = mom.variance / mom.total_mean;
  return out;
}

}  // namespace pbd::fitting
