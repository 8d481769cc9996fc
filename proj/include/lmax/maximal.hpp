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

// Uncentered Hardy-Littlewood maximal operator over grid-aligned cubes.
//
// The cube family for a grid with n cells per axis: every cube of side
// k in [1, (1 + 2e) n] cells whose lower corner a satisfies
// -e n <= a and a + k <= (1 + e) n on every axis (e = `extension`, in box
// widths; default 1). Outside the box f is zero.
//
// The average of a cube is the correctly rounded quotient of its exact sum,
// read off the prefix table, by its cell count. A single cell's average is
// also taken to be its own value, so f <= Mf holds without rounding slack.
//
//   maximal_naive  enumerates the whole family. In 1D the per-cell maximum
//                  over all cubes of one side is a monotone-deque sweep; in
//                  2D every cube writes into every cell it covers.
//   maximal_fast   1D: max slope between the lower hull of the prefix points
//                  left of x and the upper hull of those right of x, using
//                  exact orientation predicates. 2D: per side, a separable
//                  van Herk / Gil-Werman max filter over cube averages.
//
// Both produce identical doubles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <deque>
#include <utility>
#include <vector>

#include "lmax/detail/exact.hpp"
#include "lmax/detail/sliding_max.hpp"
#include "lmax/grid.hpp"

namespace lmax {

namespace detail {

/// Prefix sums in double-double.
using PrefixTable = std::vector<TwoTerm>;

/// P[i] = sum of f over cells [0, i).
inline PrefixTable prefix_1d(const GridFunction& f) {
  PrefixTable p(f.size() + 1, TwoTerm{0.0, 0.0});
  for (std::size_t i = 0; i < f.size(); ++i) p[i + 1] = dd_add(p[i], f.values()[i]);
  return p;
}

/// P[i * (n + 1) + j] = sum of f over cells [0, i) x [0, j), accumulated
/// row prefix first so that all-zero strips give exactly equal entries.
inline PrefixTable prefix_2d(const GridFunction& f) {
  const auto n = static_cast<std::size_t>(f.domain().cells_per_axis());
  PrefixTable p((n + 1) * (n + 1), TwoTerm{0.0, 0.0});
  PrefixTable row(n + 1, TwoTerm{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j + 1] = dd_add(row[j], f.values()[i * n + j]);
    for (std::size_t j = 0; j <= n; ++j) p[(i + 1) * (n + 1) + j] = dd_add(p[i * (n + 1) + j], row[j]);
  }
  return p;
}

inline Index clamp_index(Index a, Index n) { return std::clamp<Index>(a, 0, n); }

/// Average of f over the cells [a, a + k) of a 1D grid with n cells.
inline double cube_average_1d(const PrefixTable& prefix, Index n, Index a, Index k) {
  const Index lo = clamp_index(a, n), hi = clamp_index(a + k, n);
  if (hi <= lo) return 0.0;
  const TwoTerm b = prefix[static_cast<std::size_t>(hi)], a0 = prefix[static_cast<std::size_t>(lo)];
  return rounded_sum_quotient<4>({b.hi, -a0.hi, b.lo, -a0.lo}, static_cast<double>(k));
}

/// Average of f over the cube [a0, a0 + k) x [a1, a1 + k).
inline double cube_average_2d(const PrefixTable& prefix, Index n, Index a0, Index a1, Index k) {
  const Index x0 = clamp_index(a0, n), x1 = clamp_index(a0 + k, n);
  const Index y0 = clamp_index(a1, n), y1 = clamp_index(a1 + k, n);
  if (x1 <= x0 || y1 <= y0) return 0.0;
  const auto at = [&](Index i, Index j) {
    return prefix[static_cast<std::size_t>(i * (n + 1) + j)];
  };
  const TwoTerm p00 = at(x0, y0), p10 = at(x1, y0), p01 = at(x0, y1), p11 = at(x1, y1);
  return rounded_sum_quotient<8>(
      {p11.hi, -p10.hi, -p01.hi, p00.hi, p11.lo, -p10.lo, -p01.lo, p00.lo},
      static_cast<double>(k) * static_cast<double>(k));
}

/// Range of lower corners, on one axis, of side-k cubes in the family that
/// meet the domain.
struct CornerRange {
  Index lo;
  Index hi;  // inclusive
  [[nodiscard]] bool empty() const { return hi < lo; }
  [[nodiscard]] Index size() const { return hi - lo + 1; }
};

inline CornerRange corner_range(Index n, Index k, Index extension) {
  return {std::max(-extension * n, 1 - k), std::min((1 + extension) * n - k, n - 1)};
}

inline Index max_side(Index n, Index extension) { return (1 + 2 * extension) * n; }

/// Sign of sum_i x_i * w_i for double-double x_i and small integer weights
/// w_i. A floating-point filter settles clear cases; near-ties are decided
/// on the exact expansion.
template <std::size_t N>
int weighted_sign(const std::array<TwoTerm, N>& x, const std::array<double, N>& w) {
  double approx = 0.0, magnitude = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    approx += (x[i].hi + x[i].lo) * w[i];
    magnitude += std::abs(x[i].hi * w[i]);
  }
  const double bound = 16.0 * N * std::numeric_limits<double>::epsilon() * magnitude;
  if (approx > bound) return 1;
  if (approx < -bound) return -1;
  Expansion e;
  for (std::size_t i = 0; i < N; ++i) {
    e.add_product(x[i].lo, w[i]);
    e.add_product(x[i].hi, w[i]);
  }
  return e.sign();
}

/// Sign of slope(c, d) - slope(a, b) for prefix points (i, P[i]), exactly.
inline int compare_slopes(const PrefixTable& p, Index a, Index b, Index c, Index d) {
  const auto at = [&](Index i) { return p[static_cast<std::size_t>(i)]; };
  const auto ab = static_cast<double>(b - a), cd = static_cast<double>(d - c);
  return weighted_sign<4>({at(d), at(c), at(b), at(a)}, {ab, -ab, -cd, cd});
}

/// Orientation of prefix points o, a, b: > 0 for a counterclockwise turn.
inline int orientation(const PrefixTable& p, Index o, Index a, Index b) {
  // (a - o)(P[b] - P[o]) - (b - o)(P[a] - P[o])
  const auto at = [&](Index i) { return p[static_cast<std::size_t>(i)]; };
  const auto ao = static_cast<double>(a - o), bo = static_cast<double>(b - o);
  const auto ba = static_cast<double>(b - a);
  return weighted_sign<3>({at(b), at(a), at(o)}, {ao, -bo, ba});
}

inline GridFunction maximal_fast_1d(const GridFunction& f) {
  const Index n = f.domain().cells_per_axis();
  const PrefixTable p = prefix_1d(f);

  // Upper hulls of the suffixes {x + 1, ..., n}, built right to left with an
  // undo log so the sweep can peel off the leftmost point in O(1).
  struct Undo {
    Index pos;
    Index old_value;
    Index old_size;
  };
  std::vector<Index> upper(static_cast<std::size_t>(n + 1));
  Index upper_size = 0;
  std::vector<Undo> undo(static_cast<std::size_t>(n + 1));
  for (Index i = n; i >= 1; --i) {
    Index pos = upper_size;
    while (pos >= 2 && orientation(p, i, upper[static_cast<std::size_t>(pos - 1)],
                                   upper[static_cast<std::size_t>(pos - 2)]) >= 0) {
      --pos;
    }
    undo[static_cast<std::size_t>(i)] = {pos, upper[static_cast<std::size_t>(pos)], upper_size};
    upper[static_cast<std::size_t>(pos)] = i;
    upper_size = pos + 1;
  }

  std::vector<Index> lower;
  lower.reserve(static_cast<std::size_t>(n + 1));
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index x = 0; x < n; ++x) {
    while (lower.size() >= 2 && orientation(p, lower[lower.size() - 2], lower.back(), x) <= 0) {
      lower.pop_back();
    }
    lower.push_back(x);

    // Coordinate ascent on (left vertex, right vertex); the slope restricted
    // to either hull is unimodal, so a fixed point is a separating tangent.
    auto ia = static_cast<Index>(lower.size()) - 1;
    Index ib = upper_size - 1;  // stack top is the leftmost point, x + 1
    const auto left = [&](Index i) { return lower[static_cast<std::size_t>(i)]; };
    const auto right = [&](Index i) { return upper[static_cast<std::size_t>(i)]; };
    for (bool moved = true; moved;) {
      moved = false;
      while (ia > 0 && compare_slopes(p, left(ia), right(ib), left(ia - 1), right(ib)) > 0) {
        --ia;
        moved = true;
      }
      while (ia + 1 < static_cast<Index>(lower.size()) &&
             compare_slopes(p, left(ia), right(ib), left(ia + 1), right(ib)) > 0) {
        ++ia;
        moved = true;
      }
      while (ib > 0 && compare_slopes(p, left(ia), right(ib), left(ia), right(ib - 1)) > 0) {
        --ib;
        moved = true;
      }
      while (ib + 1 < upper_size &&
             compare_slopes(p, left(ia), right(ib), left(ia), right(ib + 1)) > 0) {
        ++ib;
        moved = true;
      }
    }
    const Index a = left(ia), b = right(ib);
    const double best = cube_average_1d(p, n, a, b - a);
    out[static_cast<std::size_t>(x)] = std::max(best, f[x]);

    // Drop point x + 1 from the suffix hull.
    const Undo& u = undo[static_cast<std::size_t>(x + 1)];
    upper[static_cast<std::size_t>(u.pos)] = u.old_value;
    upper_size = u.old_size;
  }
  return {f.domain(), std::move(out)};
}

inline GridFunction maximal_fast_2d(const GridFunction& f) {
  const Index n = f.domain().cells_per_axis();
  const PrefixTable p = prefix_2d(f);
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> out(f.values().begin(), f.values().end());
  std::vector<double> averages, row_max, column, column_out(nn), row_out(nn);
  CoverMaxFilter filter;
  for (Index k = 1; k <= max_side(n, 1); ++k) {
    const CornerRange r = corner_range(n, k, 1);
    if (r.empty()) continue;
    const auto m = static_cast<std::size_t>(r.size());
    averages.resize(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        averages[i * m + j] = cube_average_2d(p, n, r.lo + static_cast<Index>(i),
                                              r.lo + static_cast<Index>(j), k);
      }
    }
    // Along the second axis: row_max[i * n + y] = max over corners covering y.
    row_max.resize(m * nn);
    for (std::size_t i = 0; i < m; ++i) {
      filter.apply(std::span<const double>(averages).subspan(i * m, m), r.lo, k, n, row_out);
      std::copy(row_out.begin(), row_out.end(), row_max.begin() + static_cast<std::ptrdiff_t>(i * nn));
    }
    // Along the first axis.
    column.resize(m);
    for (std::size_t y = 0; y < nn; ++y) {
      for (std::size_t i = 0; i < m; ++i) column[i] = row_max[i * nn + y];
      filter.apply(column, r.lo, k, n, column_out);
      for (std::size_t x = 0; x < nn; ++x) {
        out[x * nn + y] = std::max(out[x * nn + y], column_out[x]);
      }
    }
  }
  return {f.domain(), std::move(out)};
}

}  // namespace detail

/// Reference evaluation over the full cube family (see file comment).
inline GridFunction maximal_naive(const GridFunction& f, Index extension = 1) {
  if (extension < 1) throw InvalidArgument("cube family must reach at least one box width out");
  const Index n = f.domain().cells_per_axis();
  std::vector<double> out(f.values().begin(), f.values().end());

  if (f.domain().dimension() == 1) {
    const detail::PrefixTable p = detail::prefix_1d(f);
    std::vector<double> averages;
    std::deque<Index> window;  // corner offsets with decreasing averages
    for (Index k = 1; k <= detail::max_side(n, extension); ++k) {
      const detail::CornerRange r = detail::corner_range(n, k, extension);
      if (r.empty()) continue;
      averages.resize(static_cast<std::size_t>(r.size()));
      for (Index a = r.lo; a <= r.hi; ++a) {
        averages[static_cast<std::size_t>(a - r.lo)] = detail::cube_average_1d(p, n, a, k);
      }
      // Cell x is covered by corners a in [x - k + 1, x].
      window.clear();
      Index next = r.lo;
      for (Index x = 0; x < n; ++x) {
        for (; next <= std::min(x, r.hi); ++next) {
          const double v = averages[static_cast<std::size_t>(next - r.lo)];
          while (!window.empty() && averages[static_cast<std::size_t>(window.back() - r.lo)] <= v) {
            window.pop_back();
          }
          window.push_back(next);
        }
        while (!window.empty() && window.front() < x - k + 1) window.pop_front();
        if (!window.empty()) {
          auto& o = out[static_cast<std::size_t>(x)];
          o = std::max(o, averages[static_cast<std::size_t>(window.front() - r.lo)]);
        }
      }
    }
    return {f.domain(), std::move(out)};
  }

  const detail::PrefixTable p = detail::prefix_2d(f);
  for (Index k = 1; k <= detail::max_side(n, extension); ++k) {
    const detail::CornerRange r = detail::corner_range(n, k, extension);
    for (Index a0 = r.lo; a0 <= r.hi; ++a0) {
      for (Index a1 = r.lo; a1 <= r.hi; ++a1) {
        const double v = detail::cube_average_2d(p, n, a0, a1, k);
        const Index x0 = std::max<Index>(a0, 0), x1 = std::min(a0 + k, n);
        const Index y0 = std::max<Index>(a1, 0), y1 = std::min(a1 + k, n);
        for (Index x = x0; x < x1; ++x) {
          for (Index y = y0; y < y1; ++y) {
            auto& o = out[static_cast<std::size_t>(x * n + y)];
            o = std::max(o, v);
          }
        }
      }
    }
  }
  return {f.domain(), std::move(out)};
}

/// Same values as maximal_naive, computed by the fast kernels.
inline GridFunction maximal_fast(const GridFunction& f) {
  return f.domain().dimension() == 1 ? detail::maximal_fast_1d(f) : detail::maximal_fast_2d(f);
}

}  // namespace lmax
