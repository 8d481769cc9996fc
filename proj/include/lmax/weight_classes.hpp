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

// Empirical constants of the weight classes A_p, A_1, B_p, B_{p,inf}, the
// doubling condition, and the cube-family condition
//
//   W(u(U Q_j)) / W(u(U S_j)) <= C max_j (|Q_j| / |S_j|)^q,   S_j in Q_j,
//
// together with a seeded search for families that make its ratio large.
// Every supremum here is a maximum over a finite sample; unboundedness shows
// up as growth under refinement, never as a single large number.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "lmax/errors.hpp"
#include "lmax/grid.hpp"
#include "lmax/maximal.hpp"
#include "lmax/random.hpp"
#include "lmax/weights.hpp"

namespace lmax {

/// Geometric sample grid 2^(k / steps_per_octave) for k in
/// [min_octave * steps, max_octave * steps].
struct GeometricGrid {
  int min_octave = -20;
  int max_octave = 20;
  int steps_per_octave = 1;

  [[nodiscard]] std::vector<double> points() const {
    std::vector<double> pts;
    for (int k = min_octave * steps_per_octave; k <= max_octave * steps_per_octave; ++k) {
      pts.push_back(std::exp2(static_cast<double>(k) / steps_per_octave));
    }
    return pts;
  }
};

/// sup over r of r^p * (integral_r^inf w(t) t^-p dt) / W(r); nullopt when
/// the tail integral diverges.
inline std::optional<double> bp_constant(const WeightW& w, double p, GeometricGrid grid = {}) {
  if (!(p > 0.0)) throw InvalidArgument("B_p needs p > 0");
  double best = 0.0;
  for (double r : grid.points()) {
    const auto tail = w.tail_integral(p, r);
    if (!tail) return std::nullopt;
    best = std::max(best, std::pow(r, p) * *tail / w.cumulative(r));
  }
  return best;
}

/// sup over r < t of (W(t) / t^p) / (W(r) / r^p), 0 < p <= 1.
inline double bpinf_constant(const WeightW& w, double p, GeometricGrid grid = {}) {
  if (!(p > 0.0) || p > 1.0) throw InvalidArgument("B_{p,inf} is evaluated for 0 < p <= 1");
  double best = 1.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (double t : grid.points()) {
    const double g = w.cumulative(t) / std::pow(t, p);
    if (smallest < std::numeric_limits<double>::infinity()) best = std::max(best, g / smallest);
    smallest = std::min(smallest, g);
  }
  return best;
}

/// sup over r of W(2r) / W(r) on a quarter-octave grid.
inline double delta2_constant(const WeightW& w, GeometricGrid grid = {-20, 20, 4}) {
  double best = 0.0;
  for (double r : grid.points()) best = std::max(best, w.cumulative(2.0 * r) / w.cumulative(r));
  return best;
}

/// Same, restricted to r in [r_min, r_max].
inline double delta2_constant_on(const WeightW& w, double r_min, double r_max) {
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw InvalidArgument("doubling range must be positive");
  double best = 0.0;
  const int steps = std::max(1, static_cast<int>(std::ceil(4.0 * std::log2(r_max / r_min))));
  for (int k = 0; k <= steps; ++k) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / steps);
    best = std::max(best, w.cumulative(2.0 * r) / w.cumulative(r));
  }
  return best;
}

/// max over cubes Q inside the box of avg_Q(u) * avg_Q(u^(-1/(p-1)))^(p-1).
inline double ap_constant(const WeightU& u, double p) {
  if (!(p > 1.0)) throw InvalidArgument("A_p needs p > 1");
  const GridDomain& d = u.domain();
  const Index n = d.cells_per_axis();
  std::vector<double> dual(u.values().values().begin(), u.values().values().end());
  for (double& v : dual) v = std::pow(v, -1.0 / (p - 1.0));
  const GridFunction dual_f(d, std::move(dual));
  double best = 0.0;
  if (d.dimension() == 1) {
    const auto pu = detail::prefix_1d(u.values());
    const auto pv = detail::prefix_1d(dual_f);
    for (Index a = 0; a < n; ++a) {
      for (Index k = 1; a + k <= n; ++k) {
        const double avg_u = detail::cube_average_1d(pu, n, a, k);
        const double avg_v = detail::cube_average_1d(pv, n, a, k);
        best = std::max(best, avg_u * std::pow(avg_v, p - 1.0));
      }
    }
    return best;
  }
  const auto pu = detail::prefix_2d(u.values());
  const auto pv = detail::prefix_2d(dual_f);
  for (Index k = 1; k <= n; ++k) {
    for (Index x0 = 0; x0 + k <= n; ++x0) {
      for (Index y0 = 0; y0 + k <= n; ++y0) {
        const double avg_u = detail::cube_average_2d(pu, n, x0, y0, k);
        const double avg_v = detail::cube_average_2d(pv, n, x0, y0, k);
        best = std::max(best, avg_u * std::pow(avg_v, p - 1.0));
      }
    }
  }
  return best;
}

/// max over cells of Mu / u.
inline double a1_constant(const WeightU& u) {
  const GridFunction mu = maximal_naive(u.values());
  double best = 0.0;
  for (Index i = 0; i < static_cast<Index>(mu.size()); ++i) best = std::max(best, mu[i] / u[i]);
  return best;
}

/// A cube together with a nonempty subset of its cells.
struct CubePair {
  CubeSpec cube;
  GridSet subset;
};

/// Finite family of (Q_j, S_j), S_j a nonempty subset of Q_j, every Q_j inside
/// the box.
class CubeFamily {
 public:
  explicit CubeFamily(std::vector<CubePair> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw InvalidArgument("cube family must not be empty");
    const GridDomain& d = pairs_.front().subset.domain();
    for (const auto& pr : pairs_) {
      if (!(pr.subset.domain() == d)) throw DomainMismatch();
      if (!pr.cube.inside(d)) throw InvalidArgument("family cubes must lie inside the box");
      if (pr.subset.empty()) throw InvalidArgument("family subsets must be nonempty");
      if (!pr.subset.is_subset_of(pr.cube.as_set(d))) {
        throw InvalidArgument("family subset escapes its cube");
      }
    }
  }

  [[nodiscard]] const std::vector<CubePair>& pairs() const { return pairs_; }
  [[nodiscard]] const GridDomain& domain() const { return pairs_.front().subset.domain(); }
  [[nodiscard]] std::size_t size() const { return pairs_.size(); }

 private:
  std::vector<CubePair> pairs_;
};

/// W(u(U Q_j)) / W(u(U S_j)) / max_j (|Q_j| / |S_j|)^q.
inline double raposo_ratio(const WeightU& u, const WeightW& w, const CubeFamily& fam, double q) {
  if (!(q > 0.0)) throw InvalidArgument("family exponent q must be positive");
  const GridDomain& d = fam.domain();
  if (!(u.domain() == d)) throw DomainMismatch();
  GridSet cubes(d), subsets(d);
  double worst = 0.0;
  for (const auto& pr : fam.pairs()) {
    cubes |= pr.cube.as_set(d);
    subsets |= pr.subset;
    worst = std::max(worst, static_cast<double>(pr.cube.cells(d.dimension())) /
                                static_cast<double>(pr.subset.count()));
  }
  const double num = w.cumulative(measure_u(u, cubes));
  const double den = w.cumulative(measure_u(u, subsets));
  return num / den / std::pow(worst, q);
}

/// Best family found for one exponent q. `level` is the grid resolution.
struct RaposoCertificate {
  CubeFamily family;
  double q;
  double ratio;
  Index level;
  std::size_t trial;

  /// True when the stored ratio is reproduced exactly.
  [[nodiscard]] bool verify(const WeightU& u, const WeightW& w) const {
    return raposo_ratio(u, w, family, q) == ratio;
  }
};

struct RaposoSearchOptions {
  /// Exponents to test; empty means 8 equispaced points p*i/9, i = 1..8.
  std::vector<double> q_grid;
  std::size_t budget = 32;
  std::uint64_t seed = 0;
  std::size_t max_family = 8;
  std::size_t max_local_steps = 256;
};

inline std::vector<double> default_q_grid(double p, std::size_t points = 8) {
  std::vector<double> q;
  for (std::size_t i = 1; i <= points; ++i) {
    q.push_back(p * static_cast<double>(i) / static_cast<double>(points + 1));
  }
  return q;
}

namespace detail {

constexpr std::uint64_t kRaposoStream = 0x5241504f534fULL;

inline bool cubes_overlap(const CubeSpec& a, const CubeSpec& b, int dim) {
  for (int ax = 0; ax < dim; ++ax) {
    if (a.lower[ax] + a.side <= b.lower[ax] || b.lower[ax] + b.side <= a.lower[ax]) return false;
  }
  return true;
}

inline std::vector<Index> cube_cells(const CubeSpec& c, const GridDomain& d) {
  std::vector<Index> cells;
  const auto set = c.as_set(d);
  for (Index i = 0; i < d.cell_count(); ++i) {
    if (set.contains(i)) cells.push_back(i);
  }
  return cells;
}

/// Random family of pairwise disjoint cubes with subsets of dyadic density
/// 1/2, 1/4, 1/8 or 1/16 (at least one cell).
inline std::vector<CubePair> random_family(const GridDomain& d, std::size_t max_family, Rng& rng) {
  const Index n = d.cells_per_axis();
  const int dim = d.dimension();
  std::uniform_int_distribution<std::size_t> count_dist(1, max_family);
  const std::size_t want = count_dist(rng);
  const Index max_side = std::max<Index>(1, n / 2);
  std::vector<CubePair> pairs;
  for (std::size_t attempt = 0; attempt < 8 * want && pairs.size() < want; ++attempt) {
    // Side log-uniform in [1, max_side].
    std::uniform_real_distribution<double> log_side(0.0, std::log2(static_cast<double>(max_side) + 1.0));
    const Index side = std::clamp<Index>(static_cast<Index>(std::exp2(log_side(rng))), 1, max_side);
    std::uniform_int_distribution<Index> pos(0, n - side);
    CubeSpec c{{pos(rng), dim == 2 ? pos(rng) : 0}, side};
    const bool clash = std::any_of(pairs.begin(), pairs.end(),
                                   [&](const CubePair& pr) { return cubes_overlap(pr.cube, c, dim); });
    if (clash) continue;
    std::vector<Index> cells = cube_cells(c, d);
    std::shuffle(cells.begin(), cells.end(), rng);
    std::uniform_int_distribution<int> density(1, 4);
    const auto keep = std::max<std::size_t>(1, cells.size() >> density(rng));
    GridSet s(d);
    for (std::size_t i = 0; i < keep; ++i) s.insert(cells[i]);
    pairs.push_back({c, std::move(s)});
  }
  return pairs;
}

/// Neighbor families: per pair, remove the pair, drop the subset cell of
/// largest u, add the cube cell of smallest u, grow or shrink the cube by
/// one cell, or translate the pair by one cell along an axis.
inline std::vector<std::vector<CubePair>> local_moves(const std::vector<CubePair>& pairs,
                                                      const WeightU& u) {
  const GridDomain& d = u.domain();
  const int dim = d.dimension();
  std::vector<std::vector<CubePair>> out;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    if (pairs.size() > 1) {
      auto next = pairs;
      next.erase(next.begin() + static_cast<std::ptrdiff_t>(j));
      out.push_back(std::move(next));
    }
    const auto cells = cube_cells(pairs[j].cube, d);
    const GridSet& s = pairs[j].subset;
    if (s.count() > 1) {
      Index drop = -1;
      for (Index c : cells) {
        if (s.contains(c) && (drop < 0 || u[c] > u[drop])) drop = c;
      }
      auto next = pairs;
      next[j].subset.erase(drop);
      out.push_back(std::move(next));
    }
    Index add = -1;
    for (Index c : cells) {
      if (!s.contains(c) && (add < 0 || u[c] < u[add])) add = c;
    }
    if (add >= 0) {
      auto next = pairs;
      next[j].subset.insert(add);
      out.push_back(std::move(next));
    }
    // Grow or shrink the cube by one cell, anchored at either corner; the
    // subset keeps the cells still inside.
    for (Index delta : {Index{1}, Index{-1}}) {
      for (bool at_lower : {false, true}) {
        CubeSpec resized = pairs[j].cube;
        resized.side += delta;
        if (at_lower) {
          for (int ax = 0; ax < dim; ++ax) resized.lower[ax] -= delta;
        }
        if (resized.side < 1 || !resized.inside(d)) continue;
        bool clash = false;
        for (std::size_t i = 0; i < pairs.size() && !clash; ++i) {
          clash = i != j && cubes_overlap(pairs[i].cube, resized, dim);
        }
        if (clash) continue;
        GridSet kept(d);
        for (Index c : cells) {
          if (s.contains(c) && resized.contains(d.coord(c), dim)) kept.insert(c);
        }
        if (kept.empty()) continue;
        auto next = pairs;
        next[j] = {resized, std::move(kept)};
        out.push_back(std::move(next));
      }
    }
    for (int ax = 0; ax < dim; ++ax) {
      for (Index step : {Index{-1}, Index{1}}) {
        CubeSpec moved = pairs[j].cube;
        moved.lower[ax] += step;
        if (!moved.inside(d)) continue;
        bool clash = false;
        for (std::size_t i = 0; i < pairs.size() && !clash; ++i) {
          clash = i != j && cubes_overlap(pairs[i].cube, moved, dim);
        }
        if (clash) continue;
        GridSet shifted(d);
        for (Index c : cells) {
          if (!s.contains(c)) continue;
          CellCoord cc = d.coord(c);
          cc[ax] += step;
          shifted.insert(d.flat(cc));
        }
        auto next = pairs;
        next[j] = {moved, std::move(shifted)};
        out.push_back(std::move(next));
      }
    }
  }
  return out;
}

}  // namespace detail

/// For each q, the largest ratio reached by seeded random families of
/// disjoint cubes followed by steepest-ascent local moves. Trial t of every
/// q starts from the same family, drawn from (seed, t); ties keep the
/// earliest trial.
inline std::vector<RaposoCertificate> raposo_search(const WeightU& u, const WeightW& w, double p,
                                                    const RaposoSearchOptions& opt) {
  if (opt.budget < 1) throw InvalidArgument("search budget must be at least 1");
  if (!(p > 0.0)) throw InvalidArgument("p must be positive");
  const std::vector<double> qs = opt.q_grid.empty() ? default_q_grid(p) : opt.q_grid;
  for (double q : qs) {
    if (!(q > 0.0)) throw InvalidArgument("family exponent q must be positive");
  }
  const GridDomain& d = u.domain();

  struct TrialResult {
    std::vector<CubePair> pairs;
    double ratio = -1.0;
  };

  std::vector<RaposoCertificate> certs;
  for (double q : qs) {
    auto results = detail::parallel_map<TrialResult>(opt.budget, [&](std::size_t t) {
      Rng rng = make_rng(opt.seed, detail::kRaposoStream, t);
      TrialResult r;
      r.pairs = detail::random_family(d, opt.max_family, rng);
      r.ratio = raposo_ratio(u, w, CubeFamily(r.pairs), q);
      for (std::size_t step = 0; step < opt.max_local_steps; ++step) {
        double best = r.ratio;
        std::vector<CubePair> best_pairs;
        for (auto& cand : detail::local_moves(r.pairs, u)) {
          const double v = raposo_ratio(u, w, CubeFamily(cand), q);
          if (v > best) {
            best = v;
            best_pairs = std::move(cand);
          }
        }
        if (best_pairs.empty()) break;
        r.pairs = std::move(best_pairs);
        r.ratio = best;
      }
      return r;
    });
    std::size_t best = 0;
    for (std::size_t t = 1; t < results.size(); ++t) {
      if (results[t].ratio > results[best].ratio) best = t;
    }
    certs.push_back({CubeFamily(std::move(results[best].pairs)), q, results[best].ratio,
                     d.cells_per_axis(), best});
  }
  return certs;
}

}  // namespace lmax
