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

#include "pbd/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pbd/parallel.hpp"
#include "pbd/stats.hpp"

namespace pbd::bounds {

namespace {

McTerm mc_add(const McTerm& x, const McTerm& y) {
  return {x.estimate + y.estimate, std::hypot(x.stderr_, y.stderr_)};
}

McTerm mc_mul(const McTerm& x, const McTerm& y) {
  return {x.estimate * y.estimate,
          std::hypot(x.estimate * y.stderr_, y.estimate * x.stderr_)};
}

McTerm mc_scale(double c, const McTerm& x) { return {c * x.estimate, std::fabs(c) * x.stderr_}; }

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b9 + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Per-replicate record for the smoothing estimate: the indicator of a small
// residual population and the interned id of the cell-count vector outside B.
struct SmoothRecord {
  char indicator = 0;
  int vec_id = 0;
};

carrier::PointPattern restrict_outside(const carrier::PointPattern& xi,
                                       std::span<const carrier::Point> removed_sites) {
  std::vector<carrier::Point> kept;
  kept.reserve(static_cast<std::size_t>(xi.size()));
  for (carrier::Point x : xi.points()) {
    bool inside = false;
    for (carrier::Point s : removed_sites)
      if (s == x) {
        inside = true;
        break;
      }
    if (!inside) kept.push_back(x);
  }
  return carrier::PointPattern(std::move(kept));
}

class SmoothingSampler {
 public:
  SmoothingSampler(const models::ModelSpec& model, std::vector<carrier::Point> b_sites,
                   const carrier::PartitionScheme& scheme, double a, double u)
      : model_(model), b_sites_(std::move(b_sites)), scheme_(scheme), a_(a), u_(u) {
    if (!(a_ > 0)) throw std::invalid_argument("smoothing_estimate: a must be > 0");
    if (!(u_ > 0)) throw std::invalid_argument("smoothing_estimate: u must be > 0");
  }

  McTerm run(std::int64_t reps, std::uint64_t seed) {
    std::vector<SmoothRecord> records(static_cast<std::size_t>(reps));
    std::vector<std::vector<int>> interned;
    std::unordered_map<std::vector<int>, int, VecHash> ids;
    {
      // Sampling runs replicate-parallel; interning is a cheap serial pass.
      const auto vecs = parallel::map_replicates<std::pair<char, std::vector<int>>>(
          seed, reps, [this](std::int64_t, rng::Stream& rng) {
            const carrier::PointPattern xi = models::sample(model_, rng);
            const carrier::PointPattern outside = restrict_outside(xi, b_sites_);
            std::pair<char, std::vector<int>> rec;
            rec.first =
                (static_cast<double>(outside.size()) + 1.0 <= a_ / u_) ? 1 : 0;
            rec.second = carrier::cell_counts(scheme_, outside);
            return rec;
          });
      for (std::size_t i = 0; i < vecs.size(); ++i) {
        auto [it, fresh] = ids.try_emplace(vecs[i].second, static_cast<int>(interned.size()));
        if (fresh) interned.push_back(vecs[i].second);
        records[i] = {vecs[i].first, it->second};
      }
    }

    std::vector<std::int64_t> counts(interned.size(), 0);
    std::int64_t hits = 0;
    for (const auto& r : records) {
      ++counts[static_cast<std::size_t>(r.vec_id)];
      hits += r.indicator;
    }
    McTerm out;
    out.estimate = evaluate(counts, hits, reps, ids, interned);

    // Nonparametric bootstrap over replicates for the spread.
    const int B = 100;
    std::vector<double> boot(B);
    rng::Stream boot_rng = rng::Stream::substream(seed, 0xb007u);
    for (int b = 0; b < B; ++b) {
      std::vector<std::int64_t> c2(interned.size(), 0);
      std::int64_t h2 = 0;
      for (std::int64_t i = 0; i < reps; ++i) {
        const auto& r = records[static_cast<std::size_t>(
            boot_rng.uniform_index(static_cast<std::uint64_t>(reps)))];
        ++c2[static_cast<std::size_t>(r.vec_id)];
        h2 += r.indicator;
      }
      boot[static_cast<std::size_t>(b)] = evaluate(c2, h2, reps, ids, interned);
    }
    const auto s = stats::summarize(boot);
    out.stderr_ = s.stderr_ * std::sqrt(static_cast<double>(B));
    return out;
  }

 private:
  double evaluate(const std::vector<std::int64_t>& counts, std::int64_t hits,
                  std::int64_t reps,
                  const std::unordered_map<std::vector<int>, int, VecHash>& ids,
                  const std::vector<std::vector<int>>& interned) const {
    const double p_hat = static_cast<double>(hits) / static_cast<double>(reps);
    double max_tv = 0;
    const int cells = scheme_.cell_count();
    for (int j = 0; j < cells; ++j) {
      // TV between the empirical law of the count vector and its shift by one
      // point in cell j: sum over the union of both supports.
      double acc = 0;
      for (std::size_t v = 0; v < interned.size(); ++v) {
        const double p_here = static_cast<double>(counts[v]) / static_cast<double>(reps);
        // mass of the shifted law at this vector: law(v - e_j)
        double p_shift = 0;
        if (interned[v][static_cast<std::size_t>(j)] >= 1) {
          std::vector<int> down = interned[v];
          --down[static_cast<std::size_t>(j)];
          const auto it = ids.find(down);
          if (it != ids.end())
            p_shift = static_cast<double>(counts[static_cast<std::size_t>(it->second)]) /
                      static_cast<double>(reps);
        }
        acc += std::fabs(p_here - p_shift);
        // vectors only in the shifted support: v + e_j absent from ids
        std::vector<int> up = interned[v];
        ++up[static_cast<std::size_t>(j)];
        if (ids.find(up) == ids.end())
          acc += static_cast<double>(counts[v]) / static_cast<double>(reps);
      }
      max_tv = std::max(max_tv, 0.5 * acc);
    }
    return 4.0 * p_hat + (4.0 * u_ + 10.0) / a_ * max_tv;
  }

  const models::ModelSpec& model_;
  std::vector<carrier::Point> b_sites_;
  const carrier::PartitionScheme& scheme_;
  double a_;
  double u_;
};

McTerm smoothing_over(const models::ModelSpec& model, std::vector<carrier::Point> b_sites,
                      const carrier::PartitionScheme& scheme, double a, double u,
                      std::int64_t reps, std::uint64_t seed) {
  SmoothingSampler sampler(model, std::move(b_sites), scheme, a, u);
  return sampler.run(reps, seed);
}

// Means of (A, B\A, A*(B\A), (A+1)*A/2) over a pattern source.
struct NeighbourhoodMoments {
  McTerm a_count, b_count, ab_cross, pair_count;
};

template <class Source>
NeighbourhoodMoments neighbourhood_moments(Source&& draw, std::span<const carrier::Point> a_sites,
                                           std::span<const carrier::Point> b_sites,
                                           std::int64_t reps, std::uint64_t seed) {
  using Row = std::array<double, 4>;
  const auto rows = parallel::map_replicates<Row>(
      seed, reps, [&](std::int64_t, rng::Stream& rng) -> Row {
        const carrier::PointPattern xi = draw(rng);
        const double a_ct = xi.count_in(a_sites);
        const double b_ct = xi.count_in(b_sites);
        const double ring = b_ct - a_ct;
        return {a_ct, b_ct, a_ct * ring, (a_ct + 1.0) * a_ct / 2.0};
      });
  std::vector<double> col(rows.size());
  NeighbourhoodMoments out;
  auto summary = [&](int j) {
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][static_cast<std::size_t>(j)];
    const auto s = stats::summarize(col);
    return McTerm{s.mean, s.stderr_};
  };
  out.a_count = summary(0);
  out.b_count = summary(1);
  out.ab_cross = summary(2);
  out.pair_count = summary(3);
  return out;
}

}  // namespace

double BoundReport::total_excluding_order() const {
  double total = 0;
  for (const auto& [k, v] : exact_terms) total += v;
  for (const auto& [k, v] : mc_terms) total += v.estimate;
  return total;
}

double BoundReport::mc_stderr_total() const {
  double var = 0;
  for (const auto& [k, v] : mc_terms) var += v.stderr_ * v.stderr_;
  return std::sqrt(var);
}

namespace {

carrier::PartitionScheme blocks_of_sites(const carrier::CarrierSpace& space, int n,
                                         int block_size) {
  const int u = std::clamp(block_size, 1, n);
  int cells = n / u;
  if (cells < 1) cells = 1;
  std::vector<double> boundaries{0.0};
  std::vector<carrier::Point> centers;
  for (int j = 1; j <= cells; ++j) {
    const int hi_site = (j == cells) ? n : j * u;  // remainder folds into the last cell
    boundaries.push_back(models::site_position(hi_site, n));
    centers.push_back((boundaries[static_cast<std::size_t>(j - 1)] +
                       boundaries[static_cast<std::size_t>(j)]) /
                      2.0);
  }
  return carrier::PartitionScheme::intervals(space, std::move(boundaries), std::move(centers));
}

}  // namespace

carrier::PartitionScheme default_partition(const models::ModelSpec& model) {
  if (const auto* bern = std::get_if<models::BernoulliModel>(&model)) {
    double p_bar = 0;
    for (double q : bern->p) p_bar += q;
    p_bar /= static_cast<double>(bern->n);
    const double n = static_cast<double>(bern->n);
    const int u = static_cast<int>(std::ceil(std::cbrt(p_bar * n * n / (1.0 - p_bar))));
    return blocks_of_sites(carrier::CarrierSpace::unit_interval(), bern->n, u);
  }
  if (const auto* runs = std::get_if<models::RunsModel>(&model)) {
    const double n = static_cast<double>(runs->n);
    const double mean_total = n * std::pow(runs->p, runs->k);
    int u;
    if (mean_total >= 1.0) {
      u = static_cast<int>(
          std::ceil(std::pow(n, 2.0 / 3.0) * std::pow(runs->p, (2.0 - runs->k) / 3.0)));
    } else {
      const int cells = std::max(1, std::min(runs->n, static_cast<int>(std::ceil(1.0 / runs->p))));
      u = std::max(1, runs->n / cells);
    }
    return blocks_of_sites(carrier::CarrierSpace::circle(), runs->n, u);
  }
  const auto& cp = std::get<models::CompoundPoissonModel>(model);
  if (cp.space.kind() == carrier::SpaceKind::finite_sites) {
    std::vector<std::vector<int>> groups;
    std::vector<carrier::Point> centers;
    for (int s = 0; s < cp.space.site_count(); ++s) {
      groups.push_back({s});
      centers.push_back(static_cast<carrier::Point>(s));
    }
    return carrier::PartitionScheme::site_groups(cp.space, std::move(groups),
                                                 std::move(centers));
  }
  const double mass1 = cp.mus.empty() ? 0.0 : cp.mus.front().total();
  const int cells = std::max(1, static_cast<int>(std::ceil(std::cbrt(std::max(1.0, mass1)))));
  std::vector<double> boundaries;
  std::vector<carrier::Point> centers;
  for (int j = 0; j <= cells; ++j)
    boundaries.push_back(static_cast<double>(j) / static_cast<double>(cells));
  for (int j = 0; j < cells; ++j)
    centers.push_back((boundaries[static_cast<std::size_t>(j)] +
                       boundaries[static_cast<std::size_t>(j + 1)]) /
                      2.0);
  return carrier::PartitionScheme::intervals(cp.space, std::move(boundaries),
                                             std::move(centers));
}

carrier::PartitionScheme block_partition(const models::ModelSpec& model, int sites_per_cell) {
  if (const auto* bern = std::get_if<models::BernoulliModel>(&model))
    return blocks_of_sites(carrier::CarrierSpace::unit_interval(), bern->n, sites_per_cell);
  if (const auto* runs = std::get_if<models::RunsModel>(&model))
    return blocks_of_sites(carrier::CarrierSpace::circle(), runs->n, sites_per_cell);
  throw std::invalid_argument("block_partition: lattice-site models only");
}

McTerm smoothing_estimate(const models::ModelSpec& model, carrier::Point site,
                          const carrier::PartitionScheme& scheme, double a, double u,
                          std::int64_t reps, std::uint64_t seed) {
  const models::Neighbourhood nb = models::neighbourhoods(model, site);
  return smoothing_over(model, nb.b_sites, scheme, a, u, reps, seed);
}

double smoothing_exact_bernoulli(const models::BernoulliModel& model, carrier::Point site,
                                 const carrier::PartitionScheme& scheme, double a, double u) {
  if (model.n > 20)
    throw std::invalid_argument("smoothing_exact_bernoulli: n must be <= 20");
  if (!(a > 0) || !(u > 0))
    throw std::invalid_argument("smoothing_exact_bernoulli: a and u must be > 0");
  const models::ModelSpec spec{model};
  const models::Neighbourhood nb = models::neighbourhoods(spec, site);

  // Sites outside B, with their cell assignments.
  std::vector<int> outside_sites;
  std::vector<int> outside_cells;
  for (int i = 1; i <= model.n; ++i) {
    const carrier::Point pos = models::site_position(i, model.n);
    if (std::find(nb.b_sites.begin(), nb.b_sites.end(), pos) != nb.b_sites.end()) continue;
    outside_sites.push_back(i);
    outside_cells.push_back(scheme.cell_of(pos));
  }
  const int m = static_cast<int>(outside_sites.size());
  const int cells = scheme.cell_count();

  std::unordered_map<std::vector<int>, double, VecHash> law;
  double small_pop = 0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    double prob = 1.0;
    std::vector<int> counts(static_cast<std::size_t>(cells), 0);
    int total = 0;
    for (int t = 0; t < m; ++t) {
      const double q = model.p[static_cast<std::size_t>(outside_sites[static_cast<std::size_t>(t)] - 1)];
      if (mask & (1u << t)) {
        prob *= q;
        ++counts[static_cast<std::size_t>(outside_cells[static_cast<std::size_t>(t)])];
        ++total;
      } else {
        prob *= 1.0 - q;
      }
    }
    if (static_cast<double>(total) + 1.0 <= a / u) small_pop += prob;
    law[counts] += prob;
  }

  double max_tv = 0;
  for (int j = 0; j < cells; ++j) {
    double acc = 0;
    for (const auto& [v, p_here] : law) {
      double p_shift = 0;
      if (v[static_cast<std::size_t>(j)] >= 1) {
        std::vector<int> down = v;
        --down[static_cast<std::size_t>(j)];
        const auto it = law.find(down);
        if (it != law.end()) p_shift = it->second;
      }
      acc += std::fabs(p_here - p_shift);
      std::vector<int> up = v;
      ++up[static_cast<std::size_t>(j)];
      if (law.find(up) == law.end()) acc += p_here;
    }
    max_tv = std::max(max_tv, 0.5 * acc);
  }
  return 4.0 * small_pop + (4.0 * u + 10.0) / a * max_tv;
}

SiteErrorTerms site_error_terms(const models::ModelSpec& model, carrier::Point site,
                                const carrier::PartitionScheme& scheme, double a, double u,
                                std::int64_t reps, std::uint64_t seed) {
  const models::Neighbourhood nb = models::neighbourhoods(model, site);
  SiteErrorTerms out;
  out.rbar = smoothing_over(model, nb.b_sites, scheme, a, u, reps, seed);

  const auto plain = neighbourhood_moments(
      [&](rng::Stream& rng) { return models::sample(model, rng); }, nb.a_sites, nb.b_sites,
      reps, rng::mix64(seed ^ 0x11a1u));
  const auto palm = neighbourhood_moments(
      [&](rng::Stream& rng) { return models::sample_palm(model, site, rng); }, nb.a_sites,
      nb.b_sites, reps, rng::mix64(seed ^ 0x22b2u));

  const McTerm cross = mc_mul(out.rbar, plain.b_count);  // E[r * Xi(B)] surrogate
  out.eps1_plain = mc_add(mc_mul(out.rbar, mc_add(plain.ab_cross, plain.pair_count)),
                          mc_mul(plain.a_count, cross));
  out.eps1_palm = mc_add(mc_mul(out.rbar, mc_add(palm.ab_cross, palm.pair_count)),
                         mc_mul(palm.a_count, cross));
  const McTerm palm_ring = {palm.b_count.estimate - palm.a_count.estimate,
                            std::hypot(palm.b_count.stderr_, palm.a_count.stderr_)};
  out.eps2_palm = mc_add(mc_add(mc_mul(out.rbar, palm_ring), out.rbar), cross);
  out.palm_a_mean = palm.a_count;
  return out;
}

namespace {

// Type-II contribution for a site pair with near = far neighbourhood {x, y}:
// the second-order reduced Palm process of an independent-indicator model
// carries no mass on {x, y}, so its first-order term vanishes and its
// second-order term reduces to the smoothing term plus the cross term.
McTerm pair_error_terms_bernoulli(const models::ModelSpec& model, carrier::Point x,
                                  carrier::Point y, const carrier::PartitionScheme& scheme,
                                  double a, double u, std::int64_t reps, std::uint64_t seed) {
  const std::vector<carrier::Point> pair_sites =
      x < y ? std::vector<carrier::Point>{x, y} : std::vector<carrier::Point>{y, x};
  const McTerm rbar = smoothing_over(model, pair_sites, scheme, a, u, reps, seed);
  const auto plain = neighbourhood_moments(
      [&](rng::Stream& rng) { return models::sample(model, rng); }, pair_sites, pair_sites,
      reps, rng::mix64(seed ^ 0x33c3u));
  const McTerm cross = mc_mul(rbar, plain.b_count);
  // eps1 of the process: the ring B\A is empty, so only the pair-count and
  // cross terms survive.
  const McTerm eps1_plain = mc_add(mc_mul(rbar, plain.pair_count),
                                   mc_mul(plain.a_count, cross));
  // eps1 of the second-order Palm process: exactly zero.
  // eps2 of the second-order Palm process:
  const McTerm eps2_palm2 = mc_add(rbar, cross);
  return mc_add(eps1_plain, eps2_palm2);
}

}  // namespace

BoundReport assemble_bound(const models::ModelSpec& model, const fitting::FitResult& fit,
                           const carrier::PartitionScheme& scheme, double u,
                           std::int64_t reps, std::uint64_t seed, int max_sites,
                           int max_pairs) {
  BoundReport report;
  report.exact_terms["2*d0(G)"] = 2.0 * scheme.resolution();
  const double a = fit.diagnostics.at("a");
  const carrier::DiscreteMeasure lambda = models::mean_measure(model);
  const std::vector<carrier::Point> sites = models::site_points(model);
  const int n_sites = static_cast<int>(sites.size());

  // Stratified site subsample with Horvitz-Thompson weights when large.
  std::vector<std::pair<carrier::Point, double>> chosen;  // (site, weight)
  if (n_sites <= max_sites) {
    for (carrier::Point s : sites) chosen.emplace_back(s, 1.0);
  } else {
    rng::Stream pick = rng::Stream::substream(seed, 0x5173u);
    const int strata = max_sites;
    for (int g = 0; g < strata; ++g) {
      const int lo = static_cast<int>(static_cast<std::int64_t>(g) * n_sites / strata);
      const int hi = static_cast<int>(static_cast<std::int64_t>(g + 1) * n_sites / strata);
      const int span = hi - lo;
      if (span <= 0) continue;
      const int at = lo + static_cast<int>(pick.uniform_index(static_cast<std::uint64_t>(span)));
      chosen.emplace_back(sites[static_cast<std::size_t>(at)], static_cast<double>(span));
    }
    report.meta["sites_subsampled"] = 1.0;
  }
  report.meta["sites_evaluated"] = static_cast<double>(chosen.size());

  if (fit.regime == fitting::Regime::overdispersed) {
    const double b = fit.diagnostics.at("b");
    McTerm integral{0, 0};
    std::uint64_t site_salt = 0;
    for (const auto& [site, weight] : chosen) {
      const SiteErrorTerms terms =
          site_error_terms(model, site, scheme, a, u, reps, rng::mix64(seed + ++site_salt));
      McTerm site_sum = mc_scale(1.0 + b, mc_add(terms.eps1_palm, terms.eps1_plain));
      site_sum = mc_add(site_sum, mc_scale(b, mc_mul(terms.rbar, terms.palm_a_mean)));
      site_sum = mc_add(site_sum, mc_scale(b, terms.eps2_palm));
      integral = mc_add(integral, mc_scale(weight * lambda.mass_at(site), site_sum));
    }
    report.mc_terms["site_integral"] = integral;
  } else {
    if (!std::holds_alternative<models::BernoulliModel>(model))
      throw std::invalid_argument(
          "assemble_bound: the kill-rate branch needs pairwise neighbourhood structure, "
          "which is only available for the independent-indicator model");
    const auto& bern = std::get<models::BernoulliModel>(model);
    const double beta = fit.diagnostics.at("beta");

    McTerm site_integral{0, 0};
    std::uint64_t salt = 0;
    for (const auto& [site, weight] : chosen) {
      const SiteErrorTerms terms =
          site_error_terms(model, site, scheme, a, u, reps, rng::mix64(seed + ++salt));
      site_integral = mc_add(site_integral,
                             mc_scale(weight * lambda.mass_at(site),
                                      mc_add(terms.eps1_palm, terms.eps1_plain)));
    }
    report.mc_terms["site_integral"] = site_integral;

    // Pair integral over the second factorial intensity, exploiting symmetry
    // of the pair terms in (x, y).
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= bern.n; ++i)
      for (int j = i + 1; j <= bern.n; ++j) pairs.emplace_back(i, j);
    double pair_weight = 1.0;
    if (static_cast<int>(pairs.size()) > max_pairs) {
      rng::Stream pick = rng::Stream::substream(seed, 0x9a17u);
      std::vector<std::pair<int, int>> subset;
      for (int t = 0; t < max_pairs; ++t)
        subset.push_back(pairs[static_cast<std::size_t>(
            pick.uniform_index(static_cast<std::uint64_t>(pairs.size())))]);
      pair_weight = static_cast<double>(pairs.size()) / static_cast<double>(max_pairs);
      pairs = std::move(subset);
      report.meta["pairs_subsampled"] = 1.0;
    }
    report.meta["pairs_evaluated"] = static_cast<double>(pairs.size());

    McTerm pair_integral{0, 0};
    for (const auto& [i, j] : pairs) {
      const carrier::Point x = models::site_position(i, bern.n);
      const carrier::Point y = models::site_position(j, bern.n);
      const McTerm term =
          pair_error_terms_bernoulli(model, x, y, scheme, a, u, reps, rng::mix64(seed + ++salt));
      const double lam2 =
          2.0 * bern.p[static_cast<std::size_t>(i - 1)] * bern.p[static_cast<std::size_t>(j - 1)];
      pair_integral = mc_add(pair_integral, mc_scale(pair_weight * lam2, term));
    }
    report.mc_terms["pair_integral"] = mc_scale(beta, pair_integral);
  }

  report.order_terms["model_shape"] = asymptotic_shape(model, fit);
  return report;
}

double bernoulli_kappa(std::span<const double> p, const carrier::PartitionScheme& scheme) {
  const int n = static_cast<int>(p.size());
  std::vector<std::vector<double>> cell_terms(static_cast<std::size_t>(scheme.cell_count()));
  for (int i = 1; i <= n; ++i) {
    const int cell = scheme.cell_of(models::site_position(i, n));
    const double q = p[static_cast<std::size_t>(i - 1)];
    cell_terms[static_cast<std::size_t>(cell)].push_back(q * (1.0 - q));
  }
  double kappa = 0;
  for (auto& terms : cell_terms) {
    double contribution = 1.0;
    if (terms.size() >= 3) {
      std::sort(terms.begin(), terms.end(), std::greater<>());
      double s = stats::kahan_sum(terms) - terms[0] - terms[1];
      if (s > 0) contribution = std::min(1.0, 1.0 / (2.0 * std::sqrt(s)));
    }
    kappa = std::max(kappa, contribution);
  }
  return kappa;
}

double asymptotic_shape(const models::ModelSpec& model, const fitting::FitResult& fit) {
  if (const auto* bern = std::get_if<models::BernoulliModel>(&model)) {
    const carrier::PartitionScheme scheme = default_partition(model);
    double u_max = 0;
    for (const auto& cell : scheme.cells())
      u_max = std::max(u_max, (cell.hi - cell.lo) * bern->n);
    double l1 = 0, l2 = 0;
    for (double q : bern->p) {
      l1 += q;
      l2 += q * q;
    }
    return u_max / bern->n + bernoulli_kappa(bern->p, scheme) * l2 / l1;
  }
  if (const auto* runs = std::get_if<models::RunsModel>(&model)) {
    const double mean_total = runs->n * std::pow(runs->p, runs->k);
    if (mean_total >= 1.0)
      return std::pow(runs->p, 2.0 / 3.0) / std::cbrt(mean_total);
    return runs->p;
  }
  const auto& cp = std::get<models::CompoundPoissonModel>(model);
  const carrier::PartitionScheme scheme = default_partition(model);
  std::vector<double> cell_mass(static_cast<std::size_t>(scheme.cell_count()), 0.0);
  if (!cp.mus.empty())
    for (const auto& [x, w] : cp.mus.front().atoms())
      cell_mass[static_cast<std::size_t>(scheme.cell_of(x))] += w;
  double worst = 0;
  for (double m : cell_mass)
    worst = std::max(worst, m > 0 ? std::min(1.0, 1.0 / std::sqrt(m)) : 1.0);
  double third = 0;
  for (std::size_t j = 0; j < cp.mus.size(); ++j) {
    const double s = static_cast<double>(j + 1);
    third += s * s * s * cp.mus[j].total();
  }
  return 2.0 * scheme.resolution() + worst * third / fit.diagnostics.at("a");
}

}  // namespace pbd::bounds
