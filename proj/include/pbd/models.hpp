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

#ifndef PBD_MODELS_HPP_
#define PBD_MODELS_HPP_

#include <cstdint>
#include <variant>
#include <vector>

#include "pbd/carrier.hpp"
#include "pbd/rng.hpp"

namespace pbd::models {

// Position of site i (1-based) among n equally spaced sites.
inline carrier::Point site_position(int i, int n) {
  return static_cast<double>(i) / static_cast<double>(n);
}

// Independent indicators at sites i/n on the unit interval.
struct BernoulliModel {
  int n = 0;
  std::vector<double> p;  // success probability per site, each in (0, 1)

  BernoulliModel(int n_in, std::vector<double> p_in);
  BernoulliModel(int n_in, double p_equal);
};

// Point at i/n on the circle whenever a run of k consecutive successes starts
// at index i (indices cyclic).
struct RunsModel {
  int n = 0;
  int k = 2;
  double p = 0.5;

  RunsModel(int n_in, int k_in, double p_in);
};

// Superposition of independent Poisson cluster processes: clusters of size
// s = 1, 2, ... arrive with intensity measure mus[s-1] and put s points at
// the cluster location.
struct CompoundPoissonModel {
  carrier::CarrierSpace space;
  std::vector<carrier::DiscreteMeasure> mus;

  CompoundPoissonModel(carrier::CarrierSpace space_in,
                       std::vector<carrier::DiscreteMeasure> mus_in);
};

using ModelSpec = std::variant<BernoulliModel, RunsModel, CompoundPoissonModel>;

carrier::CarrierSpace space_of(const ModelSpec& model);

// All site locations carrying intensity.
std::vector<carrier::Point> site_points(const ModelSpec& model);

carrier::PointPattern sample(const ModelSpec& model, rng::Stream& rng);

struct MomentSummary {
  double total_mean = 0;
  double variance = 0;
  double second_moment = 0;
  double third_moment = 0;           // E|Xi|^3
  double second_factorial_total = 0;  // E|Xi|(|Xi|-1)
  bool third_estimated = false;       // set when the third moment is MC-based
  double third_stderr = 0;
};

// Closed-form moments where the model admits them; the runs third moment is
// Monte Carlo estimated (and flagged) since no closed form is available.
MomentSummary moments(const ModelSpec& model, std::int64_t mc_reps = 200000,
                      std::uint64_t seed = 0x9d5ba14613ac2f1bULL);

carrier::DiscreteMeasure mean_measure(const ModelSpec& model);

struct SiteMarginal {
  double value = 0;
  double stderr_ = 0;
  bool exact = false;
};

// Mass at `site` of the second-order factorial intensity integrated over the
// second coordinate; closed form for Bernoulli, MC otherwise.
SiteMarginal second_factorial_site_marginal(const ModelSpec& model, carrier::Point site,
                                            std::int64_t mc_reps = 200000,
                                            std::uint64_t seed = 0x51ab3bd2a9e1f804ULL);

// Draw from the reduced Palm process at the site (the process "seen from a
// point there", with that point removed).
carrier::PointPattern sample_palm(const ModelSpec& model, carrier::Point site,
                                  rng::Stream& rng);

struct Neighbourhood {
  std::vector<carrier::Point> a_sites;
  std::vector<carrier::Point> b_sites;  // superset of a_sites
};

// Local-dependence neighbourhoods (A ⊆ B, both containing the site).
Neighbourhood neighbourhoods(const ModelSpec& model, carrier::Point site);

// Sign expression separating the runs over/under-dispersion regimes; the
// variance is at least the mean exactly when this is >= 0.
double runs_dispersion_margin(int k, double p);

}  // namespace pbd::models

#endif  // PBD_MODELS_HPP_
