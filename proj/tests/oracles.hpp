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

// Independent reference computations used only by the tests. They share no
// code paths with the library beyond the public data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lmax/grid.hpp"

namespace lmax::testing {

/// Per-cell enumeration of every cube of the family containing the cell,
/// for integer-valued f. Sums are exact integers, so one IEEE division gives
/// the correctly rounded average.
inline GridFunction brute_maximal_integer(const GridFunction& f, Index ext = 1) {
  const GridDomain& d = f.domain();
  const Index n = d.cells_per_axis();
  std::vector<double> out(f.size(), 0.0);
  const auto at = [&](Index x, Index y) -> long long {
    if (x < 0 || x >= n || y < 0 || y >= n) return 0;
    return static_cast<long long>(f[d.dimension() == 1 ? x : x * n + y]);
  };
  for (Index i = 0; i < d.cell_count(); ++i) {
    const CellCoord c = d.coord(i);
    double best = f[i];
    for (Index k = 1; k <= (1 + 2 * ext) * n; ++k) {
      for (Index a0 = c[0] - k + 1; a0 <= c[0]; ++a0) {
        if (a0 < -ext * n || a0 + k > (1 + ext) * n) continue;
        if (d.dimension() == 1) {
          long long s = 0;
          for (Index x = a0; x < a0 + k; ++x) s += at(x, 0);
          best = std::max(best, static_cast<double>(s) / static_cast<double>(k));
          continue;
        }
        for (Index a1 = c[1] - k + 1; a1 <= c[1]; ++a1) {
          if (a1 < -ext * n || a1 + k > (1 + ext) * n) continue;
          long long s = 0;
          for (Index x = std::max<Index>(a0, 0); x < std::min(a0 + k, n); ++x) {
            for (Index y = std::max<Index>(a1, 0); y < std::min(a1 + k, n); ++y) s += at(x, y);
          }
          best = std::max(best, static_cast<double>(s) / static_cast<double>(k * k));
        }
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return {d, std::move(out)};
}

/// Per-cell enumeration in long double for real-valued f (1D only).
inline std::vector<long double> brute_maximal_long(const GridFunction& f, Index ext = 1) {
  const Index n = f.domain().cells_per_axis();
  std::vector<long double> prefix(static_cast<std::size_t>(n) + 1, 0.0L);
  for (Index i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + f[i];
  std::vector<long double> out(static_cast<std::size_t>(n));
  for (Index x = 0; x < n; ++x) {
    long double best = f[x];
    for (Index k = 1; k <= (1 + 2 * ext) * n; ++k) {
      for (Index a = x - k + 1; a <= x; ++a) {
        if (a < -ext * n || a + k > (1 + ext) * n) continue;
        const Index lo = std::clamp<Index>(a, 0, n), hi = std::clamp<Index>(a + k, 0, n);
        best = std::max(best, (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) /
                                  static_cast<long double>(k));
      }
    }
    out[static_cast<std::size_t>(x)] = best;
  }
  return out;
}

/// Random grid function with small integer values and a given zero density.
inline GridFunction random_integer_function(const GridDomain& d, std::mt19937_64& rng, int max_value = 9) {
  std::uniform_int_distribution<int> v(0, max_value);
  std::bernoulli_distribution zero(0.4);
  std::vector<double> vals(static_cast<std::size_t>(d.cell_count()));
  for (auto& x : vals) x = zero(rng) ? 0.0 : static_cast<double>(v(rng));
  return {d, std::move(vals)};
}

/// Random real-valued grid function, with runs of zeros and repeated values.
inline GridFunction random_real_function(const GridDomain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> v(0.0, 1.0);
  std::uniform_int_distribution<int> mode(0, 2);
  std::vector<double> vals(static_cast<std::size_t>(d.cell_count()));
  double last = v(rng);
  for (auto& x : vals) {
    switch (mode(rng)) {
      case 0: x = 0.0; break;
      case 1: x = last; break;
      default: x = last = v(rng) * std::exp2(std::uniform_int_distribution<int>(-8, 8)(rng)); break;
    }
  }
  return {d, std::move(vals)};
}

/// Random union of up to `intervals` cell intervals in 1D.
inline GridSet random_intervals(const GridDomain& d, std::mt19937_64& rng, int intervals = 5) {
  const Index n = d.cells_per_axis();
  GridSet e(d);
  std::uniform_int_distribution<int> count(1, intervals);
  std::uniform_int_distribution<Index> start(0, n - 1);
  std::uniform_int_distribution<Index> len(1, std::max<Index>(1, n / 8));
  for (int j = count(rng); j > 0; --j) {
    const Index a = start(rng), b = std::min(n, a + len(rng));
    for (Index x = a; x < b; ++x) e.insert(x);
  }
  return e;
}

/// Composite trapezoid rule with `nodes` subintervals.
inline double trapezoid(const std::function<double(double)>& g, double a, double b, int nodes) {
  const double h = (b - a) / nodes;
  double s = 0.5 * (g(a) + g(b));
  for (int i = 1; i < nodes; ++i) s += g(a + i * h);
  return s * h;
}

/// Largest condition-(1.5) ratio over every family of pairwise disjoint
/// intervals with subsets, for u = w = 1 on a grid of `cells` cells. With
/// Lebesgue weights the ratio depends only on the sizes (k_j, s_j), so it
/// suffices to enumerate size tuples whose total length fits.
inline double exhaustive_lebesgue_raposo(Index cells, double q, std::size_t max_family = 8) {
  double best = 0.0;
  std::vector<std::pair<Index, Index>> sizes;
  const std::function<void(Index, Index, Index)> rec = [&](Index used, Index sum_k, Index sum_s) {
    if (!sizes.empty()) {
      double worst = 0.0;
      for (auto [k, s] : sizes) worst = std::max(worst, std::pow(static_cast<double>(k) / s, q));
      best = std::max(best, (static_cast<double>(sum_k) / sum_s) / worst);
    }
    if (sizes.size() == max_family) return;
    for (Index k = 1; used + k <= cells; ++k) {
      for (Index s = 1; s <= k; ++s) {
        sizes.emplace_back(k, s);
        rec(used + k, sum_k + k, sum_s + s);
        sizes.pop_back();
      }
    }
  };
  rec(0, 0, 0);
  return best;
}

}  // namespace lmax::testing
