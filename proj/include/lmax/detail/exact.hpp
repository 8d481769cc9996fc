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

// Error-free floating-point transforms and small nonoverlapping expansions.
//
// Cube averages are defined as the correctly rounded value of an exact sum
// of prefix-table entries divided by an integer cell count. Prefix tables
// are kept in double-double, so window sums are exact whenever the values'
// binary digits span at most about 100 bits. Rounding to
// nearest is monotone, so the maximum of rounded averages equals the rounded
// maximum of exact averages. That is what lets the geometric 1D kernel (which
// compares exact slopes) and the enumeration kernel (which compares doubles)
// produce identical bits.
//
// Overflow and gradual underflow are not handled; grid values are expected
// to stay well inside the normal range.

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>

namespace lmax::detail {

struct TwoTerm {
  double hi;
  double lo;
};

/// hi + lo == a + b exactly, hi = fl(a + b).
inline TwoTerm two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

/// Same as two_sum, assuming |a| >= |b| or a == 0.
inline TwoTerm fast_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

/// Double-double accumulation acc + v. The represented value hi + lo is
/// exact as long as the running sum fits in about 106 bits.
inline TwoTerm dd_add(TwoTerm acc, double v) {
  const TwoTerm s = two_sum(acc.hi, v);
  return fast_two_sum(s.hi, s.lo + acc.lo);
}

inline TwoTerm dd_add(TwoTerm acc, TwoTerm v) {
  const TwoTerm s = two_sum(acc.hi, v.hi);
  return fast_two_sum(s.hi, s.lo + (acc.lo + v.lo));
}

/// hi + lo == a * b exactly, hi = fl(a * b).
inline TwoTerm two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

/// Nonoverlapping expansion with components stored by increasing magnitude
/// (Shewchuk). Capacity is fixed; every caller in this library needs at most
/// a dozen components.
class Expansion {
 public:
  static constexpr std::size_t kCapacity = 24;

  Expansion() = default;
  explicit Expansion(double x) { add(x); }
  Expansion(const Expansion& other) : size_(other.size_) {
    std::copy_n(other.comp_.begin(), size_, comp_.begin());
  }
  Expansion& operator=(const Expansion& other) {
    size_ = other.size_;
    std::copy_n(other.comp_.begin(), size_, comp_.begin());
    return *this;
  }

  /// Grow-Expansion with zero elimination.
  void add(double b) {
    if (b == 0.0) return;
    std::size_t out = 0;
    double q = b;
    for (std::size_t i = 0; i < size_; ++i) {
      const TwoTerm t = two_sum(q, comp_[i]);
      q = t.hi;
      if (t.lo != 0.0) comp_[out++] = t.lo;
    }
    if (q != 0.0) {
      assert(out < kCapacity);
      comp_[out++] = q;
    }
    size_ = out;
  }

  void add(TwoTerm t) {
    add(t.lo);
    add(t.hi);
  }

  void add_product(double a, double b) { add(two_prod(a, b)); }

  /// Sign of the exact value: the largest component dominates.
  [[nodiscard]] int sign() const {
    if (size_ == 0) return 0;
    return comp_[size_ - 1] > 0.0 ? 1 : -1;
  }

  /// Nearly correctly rounded estimate (summed smallest first).
  [[nodiscard]] double estimate() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size_; ++i) s += comp_[i];
    return s;
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] double component(std::size_t i) const { return comp_[i]; }

 private:
  std::array<double, kCapacity> comp_;
  std::size_t size_ = 0;
};

inline bool mantissa_is_even(double q) {
  return (std::bit_cast<std::uint64_t>(q) & 1u) == 0u;
}

/// Correctly rounded (round-to-nearest-even) value of exact / divisor, where
/// divisor is a positive integer below 2^53.
inline double rounded_quotient(const Expansion& exact, double divisor) {
  if (exact.size() == 0) return 0.0;
  // A single double divided by an exactly representable integer is already
  // correctly rounded by IEEE division.
  if (exact.size() == 1) return exact.component(0) / divisor;

  double q = exact.estimate() / divisor;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Residual exact - q * divisor, exactly.
  Expansion residual = exact;
  const TwoTerm qd = two_prod(q, divisor);
  residual.add(-qd.lo);
  residual.add(-qd.hi);
  // Clear case: the residual is far inside the rounding interval of q.
  {
    const double gap = std::min(std::nextafter(q, kInf) - q, q - std::nextafter(q, -kInf));
    const double r = residual.estimate();
    if (std::abs(r) < 0.25 * gap * divisor) return q;
  }

  // Residual sign of exact - (q + offset) * divisor, offset a half-ulp.
  auto residual_sign = [&](double q0, double half_gap, double direction) {
    Expansion r = exact;
    const TwoTerm qk = two_prod(q0, divisor);
    r.add(-qk.lo);
    r.add(-qk.hi);
    r.add(-direction * half_gap * divisor);
    return r.sign();
  };

  for (;;) {
    const double up = std::nextafter(q, kInf);
    const int s = residual_sign(q, (up - q) * 0.5, 1.0);
    if (s > 0 || (s == 0 && !mantissa_is_even(q))) {
      q = up;
      continue;
    }
    break;
  }
  for (;;) {
    const double down = std::nextafter(q, -kInf);
    const int s = residual_sign(q, (q - down) * 0.5, -1.0);
    if (s < 0 || (s == 0 && !mantissa_is_even(q))) {
      q = down;
      continue;
    }
    break;
  }
  return q;
}

/// Correctly rounded (sum of terms) / divisor. A double-double evaluation
/// with a rigorous error bound settles almost every call; only quotients
/// near a rounding boundary build the exact expansion.
template <std::size_t N>
double rounded_sum_quotient(const std::array<double, N>& terms, double divisor) {
  double hi = 0.0, lo = 0.0, err_mass = 0.0;
  bool all_zero = true;
  for (double t : terms) {
    all_zero = all_zero && t == 0.0;
    const TwoTerm s = two_sum(hi, t);
    hi = s.hi;
    lo += s.lo;
    err_mass += std::abs(s.lo);
  }
  if (all_zero) return 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double lo_err = static_cast<double>(N) * eps * err_mass;
  const TwoTerm sum = fast_two_sum(hi, lo);
  // Newton step on the double-double sum, then the residual of the result.
  double q = sum.hi / divisor;
  q += (std::fma(-q, divisor, sum.hi) + sum.lo) / divisor;
  if (q != 0.0 && std::isfinite(q) && std::abs(q) >= std::numeric_limits<double>::min()) {
    const double r_hi = std::fma(-q, divisor, sum.hi);
    const double r = r_hi + sum.lo;
    const double bound = lo_err + eps * (std::abs(r_hi) + std::abs(r));
    const auto bits = std::bit_cast<std::uint64_t>(std::abs(q));
    const double below = std::abs(q) - std::bit_cast<double>(bits - 1);  // the smaller gap
    if (std::abs(r) + bound < 0.5 * below * divisor) return q;
  }
  Expansion e;
  for (double t : terms) e.add(t);
  return rounded_quotient(e, divisor);
}

}  // namespace lmax::detail
