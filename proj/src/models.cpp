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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pbd/parallel.hpp"
#include "pbd/stats.hpp"

namespace pbd::models {

BernoulliModel::BernoulliModel(int n_in, std::vector<double> p_in)
    : n(n_in), p(std::move(p_in)) {
  if (n < 1) throw std::invalid_argument("BernoulliModel: n must be >= 1");
  if (static_cast<int>(p.size()) != n)
    throw std::invalid_argument("BernoulliModel: need one probability per site");
  for (double q : p)
    if (!(q > 0) || !(q < 1))
      throw std::invalid_argument("BernoulliModel: probabilities must lie strictly in (0, 1)");
}

BernoulliModel::BernoulliModel(int n_in, double p_equal)
    : BernoulliModel(n_in, std::vector<double>(static_cast<std::size_t>(n_in), p_equal)) {}

RunsModel::RunsModel(int n_in, int k_in, double p_in) : n(n_in), k(k_in), p(p_in) {
  if (n < 1) throw std::invalid_argument("RunsModel: n must be >= 1");
  if (k < 2) throw std::invalid_argument("RunsModel: k must be >= 2");
  if (k > n) throw std::invalid_argument("RunsModel: k must not exceed n");
  if (!(p > 0) || !(p < 1))
    throw std::invalid_argument("RunsModel: p must lie strictly in (0, 1)");
}

CompoundPoissonModel::CompoundPoissonModel(carrier::CarrierSpace space_in,
                                           std::vector<carrier::DiscreteMeasure> mus_in)
    : space(std::move(space_in)), mus(std::move(mus_in)) {
  double heavy = 0;
  bool any = false;
  for (std::size_t j = 0; j < mus.size(); ++j) {
    const double s = static_cast<double>(j + 1);
    if (mus[j].total() > 0) any = true;
    heavy += s * s * s * mus[j].total();
    for (const auto& [x, w] : mus[j].atoms())
      if (!space.contains(x))
        throw std::invalid_argument("CompoundPoissonModel: atom outside the space");
  }
  if (!any) throw std::invalid_argument("CompoundPoissonModel: all intensities are zero");
  if (!std::isfinite(heavy))
    throw std::invalid_argument("CompoundPoissonModel: third cluster moment must be finite");
}

carrier::CarrierSpace space_of(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> carrier::CarrierSpace {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BernoulliModel>)
          return carrier::CarrierSpace::unit_interval();
        else if constexpr (std::is_same_v<T, RunsModel>)
          return carrier::CarrierSpace::circle();
        else
          return m.space;
      },
      model);
}

std::vector<carrier::Point> site_points(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> std::vector<carrier::Point> {
        using T = std::decay_t<decltype(m)>;
        std::vector<carrier::Point> sites;
        if constexpr (std::is_same_v<T, CompoundPoissonModel>) {
          std::vector<std::pair<carrier::Point, double>> all;
          for (std::size_t j = 0; j < m.mus.size(); ++j)
            for (const auto& [x, w] : m.mus[j].atoms())
              if (w > 0) all.emplace_back(x, w);
          std::sort(all.begin(), all.end());
          for (const auto& [x, w] : all)
            if (sites.empty() || sites.back() != x) sites.push_back(x);
        } else {
          for (int i = 1; i <= m.n; ++i) sites.push_back(site_position(i, m.n));
        }
        return sites;
      },
      model);
}

namespace {

std::vector<char> sample_indicators(const std::vector<double>& p, rng::Stream& rng) {
  std::vector<char> ind(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) ind[i] = rng.bernoulli(p[i]) ? 1 : 0;
  return ind;
}

carrier::PointPattern runs_pattern(const std::vector<char>& ind, int n, int k) {
  std::vector<carrier::Point> pts;
  for (int i = 1; i <= n; ++i) {
    bool run = true;
    for (int j = i; j < i + k; ++j) {
      const int idx = (j - 1) % n;
      if (!ind[static_cast<std::size_t>(idx)]) {
        run = false;
        break;
      }
    }
    if (run) pts.push_back(site_position(i, n));
  }
  return carrier::PointPattern(std::move(pts));
}

carrier::Point draw_measure_atom(const carrier::DiscreteMeasure& mu, rng::Stream& rng) {
  double u = rng.uniform() * mu.total();
  double acc = 0;
  const auto& atoms = mu.atoms();
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    acc += atoms[i].second;
    if (u < acc) return atoms[i].first;
  }
  return atoms.back().first;
}

long count_runs(const std::vector<char>& ind, int n, int k) {
  long total = 0;
  for (int i = 1; i <= n; ++i) {
    bool run = true;
    for (int j = i; j < i + k; ++j)
      if (!ind[static_cast<std::size_t>((j - 1) % n)]) {
        run = false;
        break;
      }
    if (run) ++total;
  }
  return total;
}

}  // namespace

carrier::PointPattern sample(const ModelSpec& model, rng::Stream& rng) {
  return std::visit(
      [&rng](const auto& m) -> carrier::PointPattern {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BernoulliModel>) {
          std::vector<carrier::Point> pts;
          for (int i = 1; i <= m.n; ++i)
            if (rng.bernoulli(m.p[static_cast<std::size_t>(i - 1)]))
              pts.push_back(site_position(i, m.n));
          return carrier::PointPattern(std::move(pts));
        } else if constexpr (std::is_same_v<T, RunsModel>) {
          const auto ind = sample_indicators(std::vector<double>(m.n, m.p), rng);
          return runs_pattern(ind, m.n, m.k);
        } else {
          std::vector<carrier::Point> pts;
          for (std::size_t j = 0; j < m.mus.size(); ++j) {
            const double mass = m.mus[j].total();
            if (!(mass > 0)) continue;
            const long clusters = rng.poisson(mass);
            for (long c = 0; c < clusters; ++c) {
              const carrier::Point loc = draw_measure_atom(m.mus[j], rng);
              for (std::size_t rep = 0; rep <= j; ++rep) pts.push_back(loc);
            }
          }
          return carrier::PointPattern(std::move(pts));
        }
      },
      model);
}

double runs_dispersion_margin(int k, double p) {
  return 2.0 + (2.0 * k - 1.0) * std::pow(p, k) - (2.0 * k + 1.0) * std::pow(p, k - 1);
}

MomentSummary moments(const ModelSpec& model, std::int64_t mc_reps, std::uint64_t seed) {
  return std::visit(
      [&](const auto& m) -> MomentSummary {
        using T = std::decay_t<decltype(m)>;
        MomentSummary out;
        if constexpr (std::is_same_v<T, BernoulliModel>) {
          // Cumulants of an independent-indicator sum.
          double k1 = 0, k2 = 0, k3 = 0;
          for (double q : m.p) {
            k1 += q;
            k2 += q * (1 - q);
            k3 += q * (1 - q) * (1 - 2 * q);
          }
          out.total_mean = k1;
          out.variance = k2;
          out.second_moment = k2 + k1 * k1;
          out.third_moment = k3 + 3 * k1 * k2 + k1 * k1 * k1;
        } else if constexpr (std::is_same_v<T, RunsModel>) {
          const double pk = std::pow(m.p, m.k);
          const double n = static_cast<double>(m.n);
          out.total_mean = n * pk;
          out.variance = n * pk / (1 - m.p) *
                         (1 + m.p - (2 * m.k + 1) * std::pow(m.p, m.k) +
                          (2 * m.k - 1) * std::pow(m.p, m.k + 1));
          out.second_moment = out.variance + out.total_mean * out.total_mean;
          // No closed third moment; estimate it and flag the summary.
          auto cube = [&m](std::int64_t, rng::Stream& rng) {
            const auto ind = sample_indicators(std::vector<double>(m.n, m.p), rng);
            const double c = static_cast<double>(count_runs(ind, m.n, m.k));
            return c * c * c;
          };
          const auto est = parallel::replicate_mean(seed, mc_reps, cube);
          out.third_moment = est.mean;
          out.third_estimated = true;
          out.third_stderr = est.stderr_;
        } else {
          double m1 = 0, m2 = 0, m3c = 0;
          for (std::size_t j = 0; j < m.mus.size(); ++j) {
            const double s = static_cast<double>(j + 1);
            const double mass = m.mus[j].total();
            m1 += s * mass;
            m2 += s * s * mass;
            m3c += s * s * s * mass;
          }
          out.total_mean = m1;
          out.variance = m2;
          out.second_moment = m2 + m1 * m1;
          out.third_moment = m3c + 3 * m1 * m2 + m1 * m1 * m1;
        }
        out.second_factorial_total = out.second_moment - out.total_mean;
        return out;
      },
      model);
}

carrier::DiscreteMeasure mean_measure(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> carrier::DiscreteMeasure {
        using T = std::decay_t<decltype(m)>;
        std::vector<std::pair<carrier::Point, double>> atoms;
        if constexpr (std::is_same_v<T, BernoulliModel>) {
          for (int i = 1; i <= m.n; ++i)
            atoms.emplace_back(site_position(i, m.n), m.p[static_cast<std::size_t>(i - 1)]);
        } else if constexpr (std::is_same_v<T, RunsModel>) {
          const double pk = std::pow(m.p, m.k);
          for (int i = 1; i <= m.n; ++i) atoms.emplace_back(site_position(i, m.n), pk);
        } else {
          for (std::size_t j = 0; j < m.mus.size(); ++j)
            for (const auto& [x, w] : m.mus[j].atoms())
              atoms.emplace_back(x, static_cast<double>(j + 1) * w);
        }
        return carrier::DiscreteMeasure(std::move(atoms));
      },
      model);
}

namespace {

int site_index_of(const ModelSpec& model, carrier::Point site) {
  const int n = std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CompoundPoissonModel>)
          return -1;
        else
          return m.n;
      },
      model);
  if (n < 0) return -1;
  const int idx = static_cast<int>(std::llround(site * n));
  if (idx < 1 || idx > n || site_position(idx, n) != site)
    throw std::invalid_argument("site does not identify a lattice site of the model");
  return idx;
}

}  // namespace

SiteMarginal second_factorial_site_marginal(const ModelSpec& model, carrier::Point site,
                                            std::int64_t mc_reps, std::uint64_t seed) {
  if (const auto* bern = std::get_if<BernoulliModel>(&model)) {
    const int i = site_index_of(model, site);
    double lambda_total = 0;
    for (double q : bern->p) lambda_total += q;
    const double pi = bern->p[static_cast<std::size_t>(i - 1)];
    return {pi * (lambda_total - pi), 0.0, true};
  }
  auto term = [&](std::int64_t, rng::Stream& rng) {
    const carrier::PointPattern xi = sample(model, rng);
    const double at = static_cast<double>(xi.count_at(site));
    return at * (static_cast<double>(xi.size()) - at);
  };
  const auto est = parallel::replicate_mean(seed, mc_reps, term);
  return {est.mean, est.stderr_, false};
}

carrier::PointPattern sample_palm(const ModelSpec& model, carrier::Point site,
                                  rng::Stream& rng) {
  return std::visit(
      [&](const auto& m) -> carrier::PointPattern {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BernoulliModel>) {
          const int i = site_index_of(model, site);
          std::vector<carrier::Point> pts;
          for (int j = 1; j <= m.n; ++j) {
            if (j == i) continue;
            if (rng.bernoulli(m.p[static_cast<std::size_t>(j - 1)]))
              pts.push_back(site_position(j, m.n));
          }
          return carrier::PointPattern(std::move(pts));
        } else if constexpr (std::is_same_v<T, RunsModel>) {
          const int i = site_index_of(model, site);
          std::vector<char> ind(static_cast<std::size_t>(m.n));
          std::vector<char> forced(static_cast<std::size_t>(m.n), 0);
          for (int j = i; j < i + m.k; ++j) forced[static_cast<std::size_t>((j - 1) % m.n)] = 1;
          for (int j = 0; j < m.n; ++j)
            ind[static_cast<std::size_t>(j)] =
                forced[static_cast<std::size_t>(j)] ? 1 : (rng.bernoulli(m.p) ? 1 : 0);
          carrier::PointPattern pattern = runs_pattern(ind, m.n, m.k);
          pattern.remove_one(site);
          return pattern;
        } else {
          // Size-biased extra cluster at the site: a point there belongs to a
          // cluster of size s with probability proportional to s * mus_s({x}).
          std::vector<double> weights(m.mus.size());
          double total = 0;
          for (std::size_t j = 0; j < m.mus.size(); ++j) {
            weights[j] = static_cast<double>(j + 1) * m.mus[j].mass_at(site);
            total += weights[j];
          }
          if (!(total > 0))
            throw std::invalid_argument("sample_palm: site carries no intensity");
          carrier::PointPattern pattern = sample(model, rng);
          const std::size_t j = rng.weighted_index(weights);
          for (std::size_t rep = 0; rep < j; ++rep) pattern.insert(site);
          return pattern;
        }
      },
      model);
}

Neighbourhood neighbourhoods(const ModelSpec& model, carrier::Point site) {
  return std::visit(
      [&](const auto& m) -> Neighbourhood {
        using T = std::decay_t<decltype(m)>;
        Neighbourhood nb;
        if constexpr (std::is_same_v<T, RunsModel>) {
          const int i = site_index_of(model, site);
          auto window = [&](int radius) {
            std::vector<carrier::Point> sites;
            for (int j = i - radius; j <= i + radius; ++j) {
              int idx = ((j - 1) % m.n + m.n) % m.n + 1;
              sites.push_back(site_position(idx, m.n));
            }
            std::sort(sites.begin(), sites.end());
            sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
            return sites;
          };
          nb.a_sites = window(m.k - 1);
          nb.b_sites = window(2 * m.k - 2);
        } else {
          if constexpr (std::is_same_v<T, BernoulliModel>) (void)site_index_of(model, site);
          nb.a_sites = {site};
          nb.b_sites = {site};
        }
        return nb;
      },
      model);
}

}  // namespace pbd::models
