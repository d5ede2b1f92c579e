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

#include "pbd/carrier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pbd/stats.hpp"

namespace pbd::carrier {

CarrierSpace CarrierSpace::unit_interval() { return CarrierSpace(SpaceKind::unit_interval); }

CarrierSpace CarrierSpace::circle() { return CarrierSpace(SpaceKind::circle); }

CarrierSpace CarrierSpace::finite_sites(Matrix distances) {
  if (!distances.square())
    throw std::invalid_argument("finite_sites: distance matrix must be square");
  const std::size_t m = distances.rows();
  for (std::size_t i = 0; i < m; ++i) {
    if (distances(i, i) != 0.0)
      throw std::invalid_argument("finite_sites: nonzero diagonal");
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distances(i, j);
      if (!(d >= 0.0) || !(d <= 1.0))
        throw std::invalid_argument("finite_sites: entries must lie in [0, 1]");
      if (d != distances(j, i))
        throw std::invalid_argument("finite_sites: matrix must be symmetric");
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        if (distances(i, j) > distances(i, k) + distances(k, j) + 1e-12)
          throw std::invalid_argument("finite_sites: triangle inequality violated");
  CarrierSpace s(SpaceKind::finite_sites);
  s.site_distance_ = std::move(distances);
  return s;
}

int CarrierSpace::site_count() const {
  if (kind_ != SpaceKind::finite_sites)
    throw std::logic_error("site_count: not a finite-site space");
  return static_cast<int>(site_distance_.rows());
}

double CarrierSpace::distance(Point x, Point y) const {
  switch (kind_) {
    case SpaceKind::unit_interval:
      return std::fabs(x - y);
    case SpaceKind::circle: {
      double d = std::fabs(x - y);
      d = std::fmod(d, 1.0);
      return std::min(d, 1.0 - d);
    }
    case SpaceKind::finite_sites: {
      const auto i = static_cast<std::size_t>(std::llround(x));
      const auto j = static_cast<std::size_t>(std::llround(y));
      if (i >= site_distance_.rows() || j >= site_distance_.rows())
        throw std::out_of_range("distance: site index out of range");
      return site_distance_(i, j);
    }
  }
  return 0;
}

bool CarrierSpace::contains(Point x) const {
  switch (kind_) {
    case SpaceKind::unit_interval:
    case SpaceKind::circle:
      return x >= 0.0 && x <= 1.0;
    case SpaceKind::finite_sites: {
      const double r = std::round(x);
      return r == x && r >= 0 && r < static_cast<double>(site_distance_.rows());
    }
  }
  return false;
}

bool CarrierSpace::same_kind(const CarrierSpace& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == SpaceKind::finite_sites)
    return site_distance_.rows() == other.site_distance_.rows();
  return true;
}

PointPattern::PointPattern(std::vector<Point> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
}

void PointPattern::insert(Point x) {
  points_.insert(std::upper_bound(points_.begin(), points_.end(), x), x);
}

void PointPattern::remove_one(Point x) {
  const auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.end() || *it != x)
    throw std::invalid_argument("PointPattern::remove_one: point not present");
  points_.erase(it);
}

int PointPattern::count_at(Point x) const {
  const auto range = std::equal_range(points_.begin(), points_.end(), x);
  return static_cast<int>(range.second - range.first);
}

int PointPattern::count_in(std::span<const Point> sites) const {
  int total = 0;
  for (Point s : sites) total += count_at(s);
  return total;
}

DiscreteMeasure::DiscreteMeasure(std::vector<std::pair<Point, double>> atoms)
    : atoms_(std::move(atoms)) {
  for (const auto& [x, w] : atoms_)
    if (!(w >= 0) || !std::isfinite(w))
      throw std::invalid_argument("DiscreteMeasure: weights must be finite and >= 0");
  std::sort(atoms_.begin(), atoms_.end());
  std::vector<std::pair<Point, double>> merged;
  for (const auto& [x, w] : atoms_) {
    if (!merged.empty() && merged.back().first == x)
      merged.back().second += w;
    else
      merged.emplace_back(x, w);
  }
  atoms_ = std::move(merged);
  std::vector<double> ws;
  ws.reserve(atoms_.size());
  for (const auto& [x, w] : atoms_) ws.push_back(w);
  total_ = stats::kahan_sum(ws);
}

double DiscreteMeasure::mass_at(Point x) const {
  const auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), x,
      [](const std::pair<Point, double>& a, Point b) { return a.first < b; });
  if (it == atoms_.end() || it->first != x) return 0.0;
  return it->second;
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  if (!(total_ > 0)) throw std::domain_error("DiscreteMeasure::normalized: zero total mass");
  std::vector<std::pair<Point, double>> scaled = atoms_;
  for (auto& [x, w] : scaled) w /= total_;
  return DiscreteMeasure(std::move(scaled));
}

bool DiscreteMeasure::is_probability(double tol) const {
  return std::fabs(total_ - 1.0) <= tol;
}

PartitionScheme PartitionScheme::intervals(const CarrierSpace& space,
                                           std::vector<double> boundaries,
                                           std::vector<Point> centers) {
  if (space.kind() == SpaceKind::finite_sites)
    throw std::invalid_argument("PartitionScheme::intervals: use site_groups on finite-site spaces");
  if (boundaries.size() < 2 || centers.size() + 1 != boundaries.size())
    throw std::invalid_argument("PartitionScheme::intervals: need k+1 boundaries for k cells");
  if (boundaries.front() != 0.0 || boundaries.back() != 1.0)
    throw std::invalid_argument("PartitionScheme::intervals: boundaries must span [0, 1]");
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i)
    if (!(boundaries[i] < boundaries[i + 1]))
      throw std::invalid_argument("PartitionScheme::intervals: boundaries must increase");

  PartitionScheme scheme;
  scheme.kind_ = space.kind();
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    PartitionCell cell;
    cell.lo = boundaries[i];
    cell.hi = boundaries[i + 1];
    cell.center = centers[i];
    scheme.cells_.push_back(cell);
  }
  scheme.resolution_ = scheme.recompute_resolution(space);
  return scheme;
}

PartitionScheme PartitionScheme::site_groups(const CarrierSpace& space,
                                             std::vector<std::vector<int>> groups,
                                             std::vector<Point> centers) {
  if (space.kind() != SpaceKind::finite_sites)
    throw std::invalid_argument("PartitionScheme::site_groups: finite-site spaces only");
  if (groups.size() != centers.size() || groups.empty())
    throw std::invalid_argument("PartitionScheme::site_groups: one center per group");
  std::vector<char> seen(static_cast<std::size_t>(space.site_count()), 0);
  for (const auto& g : groups)
    for (int s : g) {
      if (s < 0 || s >= space.site_count())
        throw std::invalid_argument("PartitionScheme::site_groups: site out of range");
      if (seen[static_cast<std::size_t>(s)]++)
        throw std::invalid_argument("PartitionScheme::site_groups: site in two cells");
    }
  for (char c : seen)
    if (!c) throw std::invalid_argument("PartitionScheme::site_groups: uncovered site");

  PartitionScheme scheme;
  scheme.kind_ = space.kind();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    PartitionCell cell;
    cell.sites = groups[i];
    cell.center = centers[i];
    scheme.cells_.push_back(cell);
  }
  scheme.resolution_ = scheme.recompute_resolution(space);
  return scheme;
}

int PartitionScheme::cell_of(Point x) const {
  if (kind_ == SpaceKind::finite_sites) {
    const int site = static_cast<int>(std::llround(x));
    for (std::size_t i = 0; i < cells_.size(); ++i)
      for (int s : cells_[i].sites)
        if (s == site) return static_cast<int>(i);
    throw std::domain_error("cell_of: site not covered by any cell");
  }
  double y = x;
  if (kind_ == SpaceKind::circle && y == 0.0) y = 1.0;  // 0 and 1 coincide
  if (y >= cells_.front().lo && y <= cells_.front().hi) return 0;
  for (std::size_t i = 1; i < cells_.size(); ++i)
    if (y > cells_[i].lo && y <= cells_[i].hi) return static_cast<int>(i);
  throw std::domain_error("cell_of: point " + std::to_string(x) + " not covered");
}

double PartitionScheme::recompute_resolution(const CarrierSpace& space) const {
  double res = 0;
  for (const auto& cell : cells_) {
    if (space.kind() == SpaceKind::finite_sites) {
      for (int s : cell.sites)
        res = std::max(res, space.distance(static_cast<Point>(s), cell.center));
    } else if (space.kind() == SpaceKind::unit_interval) {
      res = std::max({res, space.distance(cell.lo, cell.center),
                      space.distance(cell.hi, cell.center)});
    } else {
      // Circle: the supremum over an arc is attained at an endpoint unless
      // the antipode of the center lies inside the arc.
      double sup = std::max(space.distance(cell.lo, cell.center),
                            space.distance(cell.hi, cell.center));
      double anti = cell.center + 0.5;
      if (anti > 1.0) anti -= 1.0;
      if (anti >= cell.lo && anti <= cell.hi) sup = 0.5;
      res = std::max(res, sup);
    }
  }
  return res;
}

double d1(const CarrierSpace& space, const PointPattern& xi, const PointPattern& eta) {
  if (xi.empty() && eta.empty()) return 0.0;
  if (xi.size() != eta.size()) return 1.0;
  const std::size_t n = static_cast<std::size_t>(xi.size());
  Matrix cost(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost(i, j) = space.distance(xi.points()[i], eta.points()[j]);
  const double value = assignment_cost(cost) / static_cast<double>(n);
  return std::clamp(value, 0.0, 1.0);
}

namespace {

double w1_by_transport(const CarrierSpace& space, const DiscreteMeasure& rho1,
                       const DiscreteMeasure& rho2) {
  const auto& a1 = rho1.atoms();
  const auto& a2 = rho2.atoms();
  Matrix cost(a1.size(), a2.size());
  for (std::size_t i = 0; i < a1.size(); ++i)
    for (std::size_t j = 0; j < a2.size(); ++j)
      cost(i, j) = space.distance(a1[i].first, a2[j].first);
  std::vector<double> supply, demand;
  supply.reserve(a1.size());
  demand.reserve(a2.size());
  for (const auto& [x, w] : a1) supply.push_back(w);
  for (const auto& [x, w] : a2) demand.push_back(w);
  return solve_transport(supply, demand, cost).cost;
}

double w1_unit_interval_cdf(const DiscreteMeasure& rho1, const DiscreteMeasure& rho2) {
  // Integral over [0,1] of |F1 - F2|; both CDFs are step functions.
  std::vector<double> cuts;
  for (const auto& [x, w] : rho1.atoms()) cuts.push_back(x);
  for (const auto& [x, w] : rho2.atoms()) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  stats::KahanAccumulator integral;
  double f1 = 0, f2 = 0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    f1 += rho1.mass_at(cuts[i]);
    f2 += rho2.mass_at(cuts[i]);
    const double next = (i + 1 < cuts.size()) ? cuts[i + 1] : cuts[i];
    integral.add(std::fabs(f1 - f2) * (next - cuts[i]));
  }
  return integral.sum();
}

}  // namespace

double w1_measures(const CarrierSpace& space, const DiscreteMeasure& rho1,
                   const DiscreteMeasure& rho2) {
  if (!rho1.is_probability() || !rho2.is_probability())
    throw std::invalid_argument("w1_measures: inputs must be probability measures");
  for (const auto& [x, w] : rho1.atoms())
    if (!space.contains(x)) throw std::invalid_argument("w1_measures: atom outside the space");
  for (const auto& [x, w] : rho2.atoms())
    if (!space.contains(x)) throw std::invalid_argument("w1_measures: atom outside the space");

  if (space.kind() == SpaceKind::unit_interval) {
    const double by_cdf = w1_unit_interval_cdf(rho1, rho2);
    const double by_lp = w1_by_transport(space, rho1, rho2);
    if (std::fabs(by_cdf - by_lp) > 1e-9)
      throw std::logic_error("w1_measures: CDF integral and transport solver disagree");
    return by_cdf;
  }
  return w1_by_transport(space, rho1, rho2);
}

PointPattern shuffle(const PartitionScheme& scheme, const PointPattern& xi) {
  std::vector<Point> moved;
  moved.reserve(static_cast<std::size_t>(xi.size()));
  for (Point x : xi.points()) moved.push_back(scheme.center(scheme.cell_of(x)));
  return PointPattern(std::move(moved));
}

std::vector<int> cell_counts(const PartitionScheme& scheme, const PointPattern& xi) {
  std::vector<int> counts(static_cast<std::size_t>(scheme.cell_count()), 0);
  for (Point x : xi.points()) ++counts[static_cast<std::size_t>(scheme.cell_of(x))];
  return counts;
}

}  // namespace pbd::carrier
