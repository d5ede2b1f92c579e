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

#ifndef PBD_CARRIER_HPP_
#define PBD_CARRIER_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pbd/assignment.hpp"
#include "pbd/matrix.hpp"
#include "pbd/transport.hpp"

namespace pbd::carrier {

// A carrier point.  On the interval and circle spaces this is a position in
// [0, 1]; on finite-site spaces it is the (integer-valued) site index.
using Point = double;

enum class SpaceKind { unit_interval, circle, finite_sites };

// Compact metric space with metric bounded by 1.
//   unit_interval: d0(x, y) = |x - y| on [0, 1]
//   circle:        d0(x, y) = |x - y| ∧ (1 - |x - y|), positions mod 1
//   finite_sites:  explicit symmetric distance matrix with zero diagonal,
//                  entries in [0, 1]; pseudometrics (all-zero) are allowed,
//                  the triangle inequality is checked exhaustively.
class CarrierSpace {
 public:
  static CarrierSpace unit_interval();
  static CarrierSpace circle();
  static CarrierSpace finite_sites(Matrix distances);

  SpaceKind kind() const { return kind_; }
  int site_count() const;

  double distance(Point x, Point y) const;
  bool contains(Point x) const;
  bool same_kind(const CarrierSpace& other) const;

 private:
  explicit CarrierSpace(SpaceKind kind) : kind_(kind) {}
  SpaceKind kind_;
  Matrix site_distance_;
};

// Finite multiset of carrier points, stored canonically sorted so multiset
// equality is structural equality.
class PointPattern {
 public:
  PointPattern() = default;
  explicit PointPattern(std::vector<Point> points);

  int size() const { return static_cast<int>(points_.size()); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point>& points() const { return points_; }

  void insert(Point x);
  // Removes one copy of x; throws if absent.
  void remove_one(Point x);
  // Number of points exactly at x.
  int count_at(Point x) const;
  // Number of points at any of the given locations.
  int count_in(std::span<const Point> sites) const;

  friend bool operator==(const PointPattern&, const PointPattern&) = default;

 private:
  std::vector<Point> points_;
};

// Weighted atoms on the carrier space.  Atoms are kept sorted by location
// with exact duplicates merged.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::vector<std::pair<Point, double>> atoms);

  const std::vector<std::pair<Point, double>>& atoms() const { return atoms_; }
  double total() const { return total_; }
  double mass_at(Point x) const;
  DiscreteMeasure normalized() const;
  bool is_probability(double tol = 1e-9) const;

 private:
  std::vector<std::pair<Point, double>> atoms_;
  double total_ = 0;
};

// One cell of a partition: an interval (lo, hi] of positions (the first cell
// of an interval partition is closed at lo), or an explicit set of sites on
// finite-site spaces.  Every cell carries its designated center.
struct PartitionCell {
  double lo = 0;
  double hi = 0;
  std::vector<int> sites;
  Point center = 0;
};

// A partition of the carrier space together with cell centers; resolution()
// is the largest distance from any location of a cell to its center.
class PartitionScheme {
 public:
  // Interval partition from boundaries b0 < b1 < ... < bk spanning [0, 1].
  static PartitionScheme intervals(const CarrierSpace& space,
                                   std::vector<double> boundaries,
                                   std::vector<Point> centers);
  // Site-set partition of a finite-site space; centers are site indices.
  static PartitionScheme site_groups(const CarrierSpace& space,
                                     std::vector<std::vector<int>> groups,
                                     std::vector<Point> centers);

  int cell_count() const { return static_cast<int>(cells_.size()); }
  const std::vector<PartitionCell>& cells() const { return cells_; }
  double resolution() const { return resolution_; }
  SpaceKind space_kind() const { return kind_; }

  // Index of the cell containing the point; throws if uncovered.
  int cell_of(Point x) const;
  Point center(int cell) const { return cells_[static_cast<std::size_t>(cell)].center; }

  double recompute_resolution(const CarrierSpace& space) const;

 private:
  PartitionScheme() = default;
  SpaceKind kind_ = SpaceKind::unit_interval;
  std::vector<PartitionCell> cells_;
  double resolution_ = 0;
};

// Average-matching metric between configurations: 0 when both are empty, 1
// when sizes differ, otherwise the minimum over pairings of the mean ground
// distance, computed exactly by the assignment solver.
double d1(const CarrierSpace& space, const PointPattern& xi, const PointPattern& eta);

// Exact Wasserstein-1 distance between two probability measures under the
// ground metric.  On the unit interval the value is the integral of the CDF
// difference, cross-checked against the transportation solver.
double w1_measures(const CarrierSpace& space, const DiscreteMeasure& rho1,
                   const DiscreteMeasure& rho2);

// Moves every point of the pattern to the center of its partition cell.
PointPattern shuffle(const PartitionScheme& scheme, const PointPattern& xi);

// Vector of per-cell point counts of the shuffled configuration.
std::vector<int> cell_counts(const PartitionScheme& scheme, const PointPattern& xi);

}  // namespace pbd::carrier

#endif  // PBD_CARRIER_HPP_
