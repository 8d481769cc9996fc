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

// The two weights of a weighted Lorentz space: u, gridded on the domain, and
// w, a parametric weight on (0, inf) with closed-form primitive W and tail
// integrals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lmax/errors.hpp"
#include "lmax/grid.hpp"

namespace lmax {

/// Strictly positive grid weight.
class WeightU {
 public:
  explicit WeightU(GridFunction values, Index clamped_cells = 0)
      : values_(std::move(values)), clamped_cells_(clamped_cells) {
    for (double v : values_.values()) {
      if (!(v > 0.0)) throw InvalidArgument("weight u must be strictly positive");
    }
  }

  /// u == 1.
  static WeightU lebesgue(const GridDomain& d) {
    return WeightU(GridFunction(d, std::vector<double>(static_cast<std::size_t>(d.cell_count()), 1.0)));
  }

  /// |x|^alpha sampled at cell centers. A center at the origin is moved to
  /// the smallest positive center radius; the number of such cells is kept
  /// for reporting.
  static WeightU power(const GridDomain& d, double alpha) {
    double rmin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d.cell_count(); ++i) {
      const double r = d.center_radius(i);
      if (r > 0.0) rmin = std::min(rmin, r);
    }
    std::vector<double> v(static_cast<std::size_t>(d.cell_count()));
    Index clamped = 0;
    for (Index i = 0; i < d.cell_count(); ++i) {
      double r = d.center_radius(i);
      if (r <= 0.0) {
        r = rmin;
        ++clamped;
      }
      v[static_cast<std::size_t>(i)] = alpha == 0.0 ? 1.0 : std::pow(r, alpha);
    }
    return WeightU(GridFunction(d, std::move(v)), clamped);
  }

  [[nodiscard]] const GridDomain& domain() const { return values_.domain(); }
  [[nodiscard]] const GridFunction& values() const { return values_; }
  [[nodiscard]] double operator[](Index i) const { return values_[i]; }
  [[nodiscard]] Index clamped_cells() const { return clamped_cells_; }

  /// u of the whole box.
  [[nodiscard]] double total() const { return values_.integral(); }

 private:
  GridFunction values_;
  Index clamped_cells_;
};

/// Parametric description of u, materialized per grid: |x|^alpha
/// (alpha = 0 is Lebesgue measure).
struct UWeightSpec {
  double alpha = 0.0;

  [[nodiscard]] WeightU materialize(const GridDomain& d) const {
    return alpha == 0.0 ? WeightU::lebesgue(d) : WeightU::power(d, alpha);
  }
  friend bool operator==(const UWeightSpec&, const UWeightSpec&) = default;
};

/// u(E) = sum over cells of E of u * cell volume.
inline double measure_u(const WeightU& u, const GridSet& e) {
  if (!(u.domain() == e.domain())) throw DomainMismatch();
  double s = 0.0;
  const auto member = e.membership();
  for (std::size_t i = 0; i < member.size(); ++i) {
    if (member[i]) s += u[static_cast<Index>(i)];
  }
  return s * u.domain().cell_volume();
}

/// w(t) = t^alpha, alpha > -1.
struct PowerWeight {
  double alpha = 0.0;
  friend bool operator==(const PowerWeight&, const PowerWeight&) = default;
};

/// w(t) = values[i] on [breakpoints[i-1], breakpoints[i]) (with a leading
/// breakpoint 0), and t^tail_alpha beyond the last breakpoint.
struct PiecewiseTailWeight {
  std::vector<double> breakpoints;
  std::vector<double> values;
  double tail_alpha = 0.0;
  friend bool operator==(const PiecewiseTailWeight&, const PiecewiseTailWeight&) = default;
};

namespace detail {

/// Integral of t^beta over [a, b], 0 < a <= b.
inline double power_integral(double beta, double a, double b) {
  if (beta == -1.0) return std::log(b / a);
  return (std::pow(b, beta + 1.0) - std::pow(a, beta + 1.0)) / (beta + 1.0);
}

/// Integral of t^beta over [a, inf) when beta < -1.
inline double power_tail(double beta, double a) { return std::pow(a, beta + 1.0) / -(beta + 1.0); }

}  // namespace detail

/// Parametric weight on R+ with exact primitive.
class WeightW {
 public:
  using Form = std::variant<PowerWeight, PiecewiseTailWeight>;

  explicit WeightW(PowerWeight p) : form_(p) {
    if (!(p.alpha > -1.0) || !std::isfinite(p.alpha)) {
      throw InvalidArgument("power weight exponent must exceed -1");
    }
  }

  explicit WeightW(PiecewiseTailWeight p) : form_(std::move(p)) {
    const auto& pw = std::get<PiecewiseTailWeight>(form_);
    if (pw.breakpoints.empty() || pw.breakpoints.size() != pw.values.size()) {
      throw InvalidArgument("piecewise weight needs matching breakpoints and values");
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < pw.breakpoints.size(); ++i) {
      if (!(pw.breakpoints[i] > prev)) throw InvalidArgument("breakpoints must increase from 0");
      if (!(pw.values[i] > 0.0) || !std::isfinite(pw.values[i])) {
        throw InvalidArgument("piecewise weight values must be positive");
      }
      prev = pw.breakpoints[i];
    }
    if (!std::isfinite(pw.tail_alpha)) throw InvalidArgument("tail exponent must be finite");
  }

  static WeightW power(double alpha) { return WeightW(PowerWeight{alpha}); }

  [[nodiscard]] const Form& form() const { return form_; }
  [[nodiscard]] bool is_power() const { return std::holds_alternative<PowerWeight>(form_); }

  /// Exponent governing the behavior at infinity.
  [[nodiscard]] double tail_exponent() const {
    if (const auto* p = std::get_if<PowerWeight>(&form_)) return p->alpha;
    return std::get<PiecewiseTailWeight>(form_).tail_alpha;
  }

  /// Density w(t), t > 0.
  [[nodiscard]] double density(double t) const {
    if (const auto* p = std::get_if<PowerWeight>(&form_)) return std::pow(t, p->alpha);
    const auto& pw = std::get<PiecewiseTailWeight>(form_);
    for (std::size_t i = 0; i < pw.breakpoints.size(); ++i) {
      if (t < pw.breakpoints[i]) return pw.values[i];
    }
    return std::pow(t, pw.tail_alpha);
  }

  /// W(t) = integral of w over [0, t].
  [[nodiscard]] double cumulative(double t) const {
    if (!(t >= 0.0)) throw InvalidArgument("W(t) needs t >= 0");
    if (t == 0.0) return 0.0;
    if (const auto* p = std::get_if<PowerWeight>(&form_)) {
      return std::pow(t, p->alpha + 1.0) / (p->alpha + 1.0);
    }
    const auto& pw = std::get<PiecewiseTailWeight>(form_);
    double acc = 0.0;
    double left = 0.0;
    for (std::size_t i = 0; i < pw.breakpoints.size(); ++i) {
      const double right = pw.breakpoints[i];
      if (t <= right) return acc + pw.values[i] * (t - left);
      acc += pw.values[i] * (right - left);
      left = right;
    }
    return acc + detail::power_integral(pw.tail_alpha, left, t);
  }

  /// Integral of w(t) / t^p over [r, inf), or nullopt when it diverges.
  [[nodiscard]] std::optional<double> tail_integral(double p, double r) const {
    if (!(r > 0.0)) throw InvalidArgument("tail integral needs r > 0");
    if (!(p > 0.0)) throw InvalidArgument("tail integral needs p > 0");
    const double beta = tail_exponent() - p;
    if (!(beta < -1.0)) return std::nullopt;
    if (is_power()) return detail::power_tail(beta, r);
    const auto& pw = std::get<PiecewiseTailWeight>(form_);
    double acc = 0.0;
    double left = 0.0;
    for (std::size_t i = 0; i < pw.breakpoints.size(); ++i) {
      const double a = std::max(left, r);
      const double b = pw.breakpoints[i];
      if (a < b) acc += pw.values[i] * detail::power_integral(-p, a, b);
      left = b;
    }
    return acc + detail::power_tail(beta, std::max(left, r));
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    if (const auto* p = std::get_if<PowerWeight>(&form_)) {
      os << "power(alpha=" << p->alpha << ")";
    } else {
      const auto& pw = std::get<PiecewiseTailWeight>(form_);
      os << "piecewise(pieces=" << pw.values.size() << ", tail_alpha=" << pw.tail_alpha << ")";
    }
    return os.str();
  }

  friend bool operator==(const WeightW&, const WeightW&) = default;

 private:
  Form form_;
};

inline double w_cumulative(const WeightW& w, double t) { return w.cumulative(t); }

/// nullopt signals a divergent integral.
inline std::optional<double> w_tail_integral(const WeightW& w, double p, double r) {
  return w.tail_integral(p, r);
}

}  // namespace lmax
