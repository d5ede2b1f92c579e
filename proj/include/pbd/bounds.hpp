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

#ifndef PBD_BOUNDS_HPP_
#define PBD_BOUNDS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "pbd/carrier.hpp"
#include "pbd/fitting.hpp"
#include "pbd/models.hpp"

namespace pbd::bounds {

struct McTerm {
  double estimate = 0;
  double stderr_ = 0;
};

// Assembled error bound, split by provenance: exact_terms carry explicit
// constants, order_terms are stated only up to an unspecified constant
// (evaluated with constant 1), mc_terms are Monte Carlo estimates.
struct BoundReport {
  std::map<std::string, double> exact_terms;
  std::map<std::string, double> order_terms;
  std::map<std::string, McTerm> mc_terms;
  std::map<std::string, double> meta;

  double total_excluding_order() const;
  double mc_stderr_total() const;
};

// Model-specific default partition: contiguous index blocks with centers at
// the interval midpoints and any remainder folded into the last cell.  Block
// sizes follow the per-model prescriptions with all free constants set to 1.
carrier::PartitionScheme default_partition(const models::ModelSpec& model);

// Explicit override: contiguous index blocks of the given size (lattice
// models only).
carrier::PartitionScheme block_partition(const models::ModelSpec& model, int sites_per_cell);

// Monte Carlo estimate of the smoothing term for the site:
//   4 P(Xi(B_x^c) + 1 <= a/u)
//   + (4u + 10)/a * max_j TV( law of shuffled cell counts outside B_x,
//                             the same law shifted by one point at center j )
// where `a` is the approximating process's immigration rate.  The supremum
// over configuration events is realized as total variation between laws of
// the cell-count vectors after shuffling.
McTerm smoothing_estimate(const models::ModelSpec& model, carrier::Point site,
                          const carrier::PartitionScheme& scheme, double a, double u,
                          std::int64_t reps, std::uint64_t seed);

// Exhaustive-enumeration computation of the same smoothing term for the
// independent-indicator model (2^n outcomes; n <= 20).  A separate code path
// from the MC estimate, used to validate it.
double smoothing_exact_bernoulli(const models::BernoulliModel& model, carrier::Point site,
                                 const carrier::PartitionScheme& scheme, double a, double u);

struct SiteErrorTerms {
  McTerm rbar;        // smoothing term
  McTerm eps1_plain;  // first-order term of the process itself
  McTerm eps1_palm;   // first-order term of the reduced Palm process
  McTerm eps2_palm;   // second-order term of the reduced Palm process
  McTerm palm_a_mean;  // mean Palm count in the near neighbourhood
};

// Per-site error contributions, estimated with Palm samplers and with the
// unconditional smoothing term substituted for the conditional one (for
// models whose restriction outside B_x is independent of B_x, the two
// coincide exactly).
SiteErrorTerms site_error_terms(const models::ModelSpec& model, carrier::Point site,
                                const carrier::PartitionScheme& scheme, double a, double u,
                                std::int64_t reps, std::uint64_t seed);

// Full assembled error bound for the fitted approximation: 2 d0(G) plus the
// intensity-weighted sum of per-site (and, on the kill-rate branch, per-pair)
// error terms.  Sites are subsampled with stratified Horvitz-Thompson
// weights when the model is large; meta records what was evaluated.
BoundReport assemble_bound(const models::ModelSpec& model, const fitting::FitResult& fit,
                           const carrier::PartitionScheme& scheme, double u,
                           std::int64_t reps, std::uint64_t seed, int max_sites = 48,
                           int max_pairs = 312);

// Smoothness constant of blocked indicator sums:
// max over cells of 1 ∧ 1/(2 sqrt(S_cell - two largest p(1-p) in the cell)).
// Cells with fewer than three sites (or a nonpositive radicand) contribute 1.
double bernoulli_kappa(std::span<const double> p, const carrier::PartitionScheme& scheme);

// The per-model order expression evaluated with constant 1 (an order term,
// never an exact bound).
double asymptotic_shape(const models::ModelSpec& model, const fitting::FitResult& fit);

}  // namespace pbd::bounds

#endif  // PBD_BOUNDS_HPP_
