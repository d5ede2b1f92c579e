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

#ifndef PBD_DISTANCE_HPP_
#define PBD_DISTANCE_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pbd/carrier.hpp"
#include "pbd/models.hpp"
#include "pbd/rng.hpp"
#include "pbd/sim.hpp"

namespace pbd::distance {

enum class Method { empirical_ot, exact_enumeration, coupling_bound };

std::string method_name(Method method);

struct D2Estimate {
  double value = 0;
  double stderr_ = 0;
  std::int64_t n_samples = 0;
  Method method = Method::empirical_ot;
  std::uint64_t seed = 0;
};

using Sampler = std::function<carrier::PointPattern(rng::Stream&)>;

// Pairwise d1 cost matrix between two sample sets; the parallel kernel and
// its serial reference produce identical matrices.
Matrix pairwise_d1_serial(const carrier::CarrierSpace& space,
                          const std::vector<carrier::PointPattern>& a,
                          const std::vector<carrier::PointPattern>& b);
Matrix pairwise_d1_parallel(const carrier::CarrierSpace& space,
                            const std::vector<carrier::PointPattern>& a,
                            const std::vector<carrier::PointPattern>& b);
Matrix pairwise_d1(const carrier::CarrierSpace& space,
                   const std::vector<carrier::PointPattern>& a,
                   const std::vector<carrier::PointPattern>& b);

// Empirical optimal-transport estimate of the process distance: n_samples
// configurations drawn from each side (sample i of a side uses the stream
// (seed_side, i), so two identical samplers given the same side seed produce
// distance exactly zero), pairwise d1 costs, optimal assignment divided by n.
// This is the Wasserstein-1 distance between the two empirical measures: an
// upward-biased but consistent estimator.  The standard error comes from
// half-size subsample resampling of the cached cost matrix.
D2Estimate empirical_d2(const carrier::CarrierSpace& space, const Sampler& sampler1,
                        const Sampler& sampler2, int n_samples, std::uint64_t seed1,
                        std::uint64_t seed2, int bootstrap_resamples = 200);

// An explicitly enumerated distribution over configurations.
struct ConfigDistribution {
  carrier::CarrierSpace space;
  std::vector<carrier::PointPattern> configs;
  std::vector<double> probs;
};

// Exact process distance between two enumerated distributions: the
// transportation problem with d1 costs, solved to optimality.
D2Estimate exact_d2_small(const ConfigDistribution& dist1, const ConfigDistribution& dist2);

// Upper bound on the distance between two stationary processes: total
// variation between the count laws plus the Wasserstein-1 distance between
// the placement measures.
double coupling_bound(const sim::PbdpSpec& spec1, const sim::PbdpSpec& spec2,
                      double tol = 1e-12);

// Explicit configuration law of a stationary process on a finite-site space:
// P(counts c) = pi(|c|) * multinomial(|c|; c) * prod_i placement_i^{c_i},
// truncated at total count count_cap.  Requires at most 4 sites, cap <= 10,
// and count-law tail beyond the cap at most 1e-9.
ConfigDistribution enumerate_pbdp(const sim::PbdpSpec& spec, int count_cap);

// Exact configuration law of an independent-indicator model (2^n outcomes),
// anchored on a finite-site proxy space whose site i-1 sits at position i/n.
ConfigDistribution enumerate_bernoulli(const models::BernoulliModel& model);

// Re-anchors a stationary process whose placement atoms sit exactly on the
// given positions onto the matching finite-site space (site i at
// positions[i], ground distances inherited from the original space).
sim::PbdpSpec to_site_space(const sim::PbdpSpec& spec,
                            std::span<const carrier::Point> positions);

}  // namespace pbd::distance

#endif  // PBD_DISTANCE_HPP_
