// Copyright 2026 The lmax Authors
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

#pragma once

// Discretization of R^d (d = 1, 2) by a uniform grid on the box [-L, L]^d.
// Functions are piecewise constant on cells and vanish outside the box.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmax/errors.hpp"

namespace lmax {

using Index = std::int64_t;

/// Cell coordinates; only the first `dimension` entries are meaningful.
using CellCoord = std::array<Index, 2>;

class GridDomain {
 public:
  GridDomain(int dimension, double half_width, Index cells_per_axis)
      : dimension_(dimension), half_width_(half_width), n_(cells_per_axis) {
    if (dimension != 1 && dimension != 2) {
      throw InvalidArgument("grid dimension must be 1 or 2");
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
      throw InvalidArgument("grid half width must be positive");
    }
    if (cells_per_axis < 1) {
      throw InvalidArgument("grid needs at least one cell per axis");
    }
  }

  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] double half_width() const { return half_width_; }
  [[nodiscard]] Index cells_per_axis() const { return n_; }
  [[nodiscard]] double cell_side() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  [[nodiscard]] double cell_volume() const {
    return dimension_ == 1 ? cell_side() : cell_side() * cell_side();
  }
  [[nodiscard]] Index cell_count() const { return dimension_ == 1 ? n_ : n_ * n_; }
  [[nodiscard]] double box_volume() const {
    const double side = 2.0 * half_width_;
    return dimension_ == 1 ? side : side * side;
  }

  /// Center of cell i along one axis.
  [[nodiscard]] double axis_center(Index i) const {
    return -half_width_ + (static_cast<double>(i) + 0.5) * cell_side();
  }

  /// Lower edge of cell i along one axis.
  [[nodiscard]] double axis_edge(Index i) const {
    return -half_width_ + static_cast<double>(i) * cell_side();
  }

  [[nodiscard]] Index flat(CellCoord c) const { return dimension_ == 1 ? c[0] : c[0] * n_ + c[1]; }
  [[nodiscard]] CellCoord coord(Index flat_index) const {
    if (dimension_ == 1) return {flat_index, 0};
    return {flat_index / n_, flat_index % n_};
  }

  /// Euclidean norm of the center of a cell.
  [[nodiscard]] double center_radius(Index flat_index) const {
    const CellCoord c = coord(flat_index);
    const double x = axis_center(c[0]);
    if (dimension_ == 1) return std::abs(x);
    const double y = axis_center(c[1]);
    return std::hypot(x, y);
  }

  /// The same box with twice the resolution.
  [[nodiscard]] GridDomain refined() const { return {dimension_, half_width_, 2 * n_}; }

  friend bool operator==(const GridDomain&, const GridDomain&) = default;

 private:
  int dimension_;
  double half_width_;
  Index n_;
};

/// Nonnegative piecewise-constant function, one value per cell.
class GridFunction {
 public:
  explicit GridFunction(GridDomain domain)
      : domain_(domain), values_(static_cast<std::size_t>(domain.cell_count()), 0.0) {}

  GridFunction(GridDomain domain, std::vector<double> values)
      : domain_(domain), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(domain_.cell_count())) {
      throw InvalidArgument("grid function needs one value per cell");
    }
    for (double v : values_) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("grid function values must be finite and nonnegative");
      }
    }
  }

  [[nodiscard]] const GridDomain& domain() const { return domain_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double operator[](Index i) const { return values_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  [[nodiscard]] double max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
  }
  [[nodiscard]] bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }
  /// Lebesgue integral over the box.
  [[nodiscard]] double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * domain_.cell_volume();
  }

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  GridDomain domain_;
  std::vector<double> values_;
};

/// Subset of the grid, one membership flag per cell.
class GridSet {
 public:
  explicit GridSet(GridDomain domain)
      : domain_(domain), member_(static_cast<std::size_t>(domain.cell_count()), 0) {}

  GridSet(GridDomain domain, std::vector<std::uint8_t> membership)
      : domain_(domain), member_(std::move(membership)) {
    if (member_.size() != static_cast<std::size_t>(domain_.cell_count())) {
      throw InvalidArgument("grid set needs one flag per cell");
    }
    for (auto& m : member_) m = m ? 1 : 0;
  }

  [[nodiscard]] const GridDomain& domain() const { return domain_; }
  [[nodiscard]] bool contains(Index i) const { return member_[static_cast<std::size_t>(i)] != 0; }
  void insert(Index i) { member_[static_cast<std::size_t>(i)] = 1; }
  void erase(Index i) { member_[static_cast<std::size_t>(i)] = 0; }
  [[nodiscard]] std::span<const std::uint8_t> membership() const { return member_; }

  [[nodiscard]] Index count() const {
    return static_cast<Index>(std::count(member_.begin(), member_.end(), std::uint8_t{1}));
  }
  [[nodiscard]] bool empty() const { return count() == 0; }
  /// Lebesgue measure: member cells times the cell volume.
  [[nodiscard]] double measure() const {
    return static_cast<double>(count()) * domain_.cell_volume();
  }

  [[nodiscard]] GridFunction indicator() const {
    std::vector<double> v(member_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = member_[i] ? 1.0 : 0.0;
    return {domain_, std::move(v)};
  }

  GridSet& operator|=(const GridSet& other) {
    if (!(other.domain_ == domain_)) throw DomainMismatch();
    for (std::size_t i = 0; i < member_.size(); ++i) member_[i] |= other.member_[i];
    return *this;
  }

  [[nodiscard]] bool is_subset_of(const GridSet& other) const {
    if (!(other.domain_ == domain_)) throw DomainMismatch();
    for (std::size_t i = 0; i < member_.size(); ++i) {
      if (member_[i] && !other.member_[i]) return false;
    }
    return true;
  }

  friend bool operator==(const GridSet&, const GridSet&) = default;

 private:
  GridDomain domain_;
  std::vector<std::uint8_t> member_;
};

/// Grid-aligned cube: lower corner in cell coordinates, side in cells. The
/// corner may be negative or past the last cell; such cubes see zeros there.
struct CubeSpec {
  CellCoord lower{0, 0};
  Index side = 1;

  [[nodiscard]] bool contains(CellCoord c, int dimension) const {
    for (int a = 0; a < dimension; ++a) {
      if (c[a] < lower[a] || c[a] >= lower[a] + side) return false;
    }
    return true;
  }
  [[nodiscard]] bool inside(const GridDomain& d) const {
    for (int a = 0; a < d.dimension(); ++a) {
      if (lower[a] < 0 || lower[a] + side > d.cells_per_axis()) return false;
    }
    return side >= 1;
  }
  /// Cube volume in cells.
  [[nodiscard]] Index cells(int dimension) const { return dimension == 1 ? side : side * side; }

  /// Member cells of the cube that lie in the domain.
  [[nodiscard]] GridSet as_set(const GridDomain& d) const {
    GridSet s(d);
    const Index n = d.cells_per_axis();
    const Index x0 = std::max<Index>(lower[0], 0), x1 = std::min<Index>(lower[0] + side, n);
    if (d.dimension() == 1) {
      for (Index x = x0; x < x1; ++x) s.insert(x);
      return s;
    }
    const Index y0 = std::max<Index>(lower[1], 0), y1 = std::min<Index>(lower[1] + side, n);
    for (Index x = x0; x < x1; ++x) {
      for (Index y = y0; y < y1; ++y) s.insert(x * n + y);
    }
    return s;
  }

  friend bool operator==(const CubeSpec&, const CubeSpec&) = default;
};

/// Cells whose centers lie in the half-open physical box [lower, upper).
inline GridSet box_set(const GridDomain& d, std::span<const double> lower,
                       std::span<const double> upper) {
  if (lower.size() != static_cast<std::size_t>(d.dimension()) || upper.size() != lower.size()) {
    throw InvalidArgument("box corners must have one coordinate per axis");
  }
  GridSet s(d);
  for (Index i = 0; i < d.cell_count(); ++i) {
    const CellCoord c = d.coord(i);
    bool in = true;
    for (int a = 0; a < d.dimension(); ++a) {
      const double x = d.axis_center(c[a]);
      in = in && x >= lower[a] && x < upper[a];
    }
    if (in) s.insert(i);
  }
  return s;
}

inline GridSet box_set(const GridDomain& d, std::initializer_list<double> lower,
                       std::initializer_list<double> upper) {
  return box_set(d, std::span<const double>(lower.begin(), lower.size()),
                 std::span<const double>(upper.begin(), upper.size()));
}

/// Cells where f > lambda strictly.
inline GridSet level_set(const GridFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("level must be positive");
  GridSet s(f.domain());
  for (Index i = 0; i < static_cast<Index>(f.size()); ++i) {
    if (f[i] > lambda) s.insert(i);
  }
  return s;
}

/// Pointwise product with an indicator: f on E, zero elsewhere.
inline GridFunction restrict_to(const GridFunction& f, const GridSet& e) {
  if (!(f.domain() == e.domain())) throw DomainMismatch();
  std::vector<double> v(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!e.contains(static_cast<Index>(i))) v[i] = 0.0;
  }
  return {f.domain(), std::move(v)};
}

/// Same function on the refined grid (each cell split into 2^d children).
inline GridFunction refine(const GridFunction& f) {
  const GridDomain& d = f.domain();
  const GridDomain fine = d.refined();
  std::vector<double> v(static_cast<std::size_t>(fine.cell_count()));
  for (Index i = 0; i < fine.cell_count(); ++i) {
    CellCoord c = fine.coord(i);
    c[0] /= 2;
    c[1] /= 2;
    v[static_cast<std::size_t>(i)] = f[d.flat(c)];
  }
  return {fine, std::move(v)};
}

}  // namespace lmax
