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

// Numerical checks of the inequalities that connect the weak and strong
// boundedness of M on weighted Lorentz spaces. Each check returns the
// empirical constant it observes; none of them asserts a specific value for
// an implied constant.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lmax/errors.hpp"
#include "lmax/grid.hpp"
#include "lmax/lorentz.hpp"
#include "lmax/maximal.hpp"
#include "lmax/random.hpp"
#include "lmax/rearrange.hpp"
#include "lmax/weights.hpp"

namespace lmax {

/// x (1 + log(1/x)) on (0, 1].
inline double phi(double x) {
  if (!(x > 0.0) || x > 1.0) throw InvalidArgument("phi is defined on (0, 1]");
  return x * (1.0 - std::log(x));
}

/// 32 geometric points from one cell volume to half the box volume.
inline std::vector<double> default_tgrid(const GridDomain& d, std::size_t points = 32) {
  const double lo = d.cell_volume(), hi = 0.5 * d.box_volume();
  std::vector<double> t;
  for (std::size_t i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    t.push_back(lo * std::pow(hi / lo, s));
  }
  return t;
}

struct RieszSandwich {
  double c_est;
  double C_est;
  std::vector<double> ratios;  // (Mf)*(t) / Pf*(t) per grid point
  bool dominates;              // (Mf)*(t) >= f*(t) at every grid point
};

/// Extremes over tgrid of (Mf)*(t) / (P f*)(t).
inline RieszSandwich riesz_sandwich(const GridFunction& f, std::span<const double> tgrid) {
  if (f.is_zero()) throw EmptyFunction();
  if (tgrid.empty()) throw InvalidArgument("riesz sandwich needs at least one t");
  const DecreasingStep fs = rearrangement(f);
  const DecreasingStep mfs = rearrangement(maximal_fast(f));
  RieszSandwich out{std::numeric_limits<double>::infinity(), 0.0, {}, true};
  for (double t : tgrid) {
    const double r = mfs(t) / hardy(fs, t);
    out.ratios.push_back(r);
    out.c_est = std::min(out.c_est, r);
    out.C_est = std::max(out.C_est, r);
    out.dominates = out.dominates && mfs(t) >= fs(t);
  }
  return out;
}

namespace detail {

inline void check_level(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0, 1)");
}

/// chi_{M chi_E > lambda} * M chi_E, together with the level set.
struct TruncatedMaximal {
  GridFunction m_chi;
  GridSet level;
  GridFunction g;
};

inline TruncatedMaximal truncated_maximal(const GridSet& e, double lambda) {
  GridFunction m = maximal_fast(e.indicator());
  GridSet level = level_set(m, lambda);
  GridFunction g = restrict_to(m, level);
  return {std::move(m), std::move(level), std::move(g)};
}

}  // namespace detail

struct Lemma21Check {
  double lhs;    // ||chi_{M chi_E > lambda} M chi_E||^p
  double base;   // (1 + log(1/lambda)) ||chi_E||^p
  double ratio;  // lhs / base, 0 for empty E
};

inline Lemma21Check lemma21_check(const GridSet& e, double lambda, const LorentzParams& P) {
  detail::check_level(lambda);
  if (!(e.domain() == P.u().domain())) throw DomainMismatch();
  if (e.empty()) return {0.0, 0.0, 0.0};
  const auto tm = detail::truncated_maximal(e, lambda);
  const double lhs = lorentz_norms(tm.g, P).strong_p;
  const double base = (1.0 + std::log(1.0 / lambda)) * lorentz_norms(e.indicator(), P).strong_p;
  return {lhs, base, lhs / base};
}

/// min over {M chi_E > lambda} of M(g) / (lambda (1 - log lambda)).
inline double lemma22_check(const GridSet& e, double lambda) {
  detail::check_level(lambda);
  if (e.empty()) throw InvalidArgument("lemma check needs a nonempty set");
  const auto tm = detail::truncated_maximal(e, lambda);
  const GridFunction mg = maximal_fast(tm.g);
  const double scale = lambda * (1.0 - std::log(lambda));
  double c = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < static_cast<Index>(mg.size()); ++i) {
    if (tm.level.contains(i)) c = std::min(c, mg[i] / scale);
  }
  return c;
}

/// {M chi_E > lambda} is contained in {M g > c lambda (1 - log lambda)}.
inline bool corollary_inclusion_check(const GridSet& e, double lambda, double c) {
  detail::check_level(lambda);
  if (e.empty()) return true;
  const auto tm = detail::truncated_maximal(e, lambda);
  const GridFunction mg = maximal_fast(tm.g);
  const double threshold = c * lambda * (1.0 - std::log(lambda));
  for (Index i = 0; i < static_cast<Index>(mg.size()); ++i) {
    if (tm.level.contains(i) && !(mg[i] > threshold)) return false;
  }
  return true;
}

/// int_0^1 lambda^(r-1) W(u({M chi_E > lambda}))^(r/p) d lambda, exactly per
/// level of M chi_E.
inline double prop24_integral(const GridSet& e, double r, const LorentzParams& P) {
  if (!(r > 0.0)) throw InvalidArgument("exponent r must be positive");
  if (!(e.domain() == P.u().domain())) throw DomainMismatch();
  if (e.empty()) return 0.0;
  const GridFunction m = maximal_fast(e.indicator());
  double total = 0.0;
  for (const auto& layer : lorentz_layers(m, P)) {
    const double a = std::min(layer.lower, 1.0), b = std::min(layer.upper, 1.0);
    if (b <= a) continue;
    total += std::pow(layer.w_mass, r / P.p()) * (std::pow(b, r) - std::pow(a, r)) / r;
  }
  return total;
}

enum class NormKind { Weak, Strong };

/// Ratios of one witness f: ||Mf||_weak / ||f|| and ||Mf|| / ||f||.
struct WitnessRatios {
  double weak = 0.0;
  double strong = 0.0;
};

namespace detail {

constexpr std::uint64_t kWitnessStream = 0x5749544eULL;

inline CubeSpec random_cube(const GridDomain& d, Rng& rng) {
  const Index n = d.cells_per_axis();
  const Index max_side = std::max<Index>(1, n / 4);
  std::uniform_real_distribution<double> log_side(0.0, std::log2(static_cast<double>(max_side)));
  const Index side = std::clamp<Index>(static_cast<Index>(std::llround(std::exp2(log_side(rng)))), 1, max_side);
  std::uniform_int_distribution<Index> pos(0, n - side);
  return {{pos(rng), d.dimension() == 2 ? pos(rng) : 0}, side};
}

}  // namespace detail

/// Witness t: even t is the indicator of a union of up to 8 random cubes,
/// odd t a simple function max_i v_i chi_{Q_i} over three random cubes with
/// three distinct values. Depends only on (seed, t) and the domain.
inline GridFunction witness_function(const GridDomain& d, std::uint64_t seed, std::size_t t) {
  Rng rng = make_rng(seed, detail::kWitnessStream, t);
  std::vector<double> v(static_cast<std::size_t>(d.cell_count()), 0.0);
  const auto paint = [&](const CubeSpec& c, double value) {
    const GridSet s = c.as_set(d);
    for (Index i = 0; i < d.cell_count(); ++i) {
      if (s.contains(i)) v[static_cast<std::size_t>(i)] = std::max(v[static_cast<std::size_t>(i)], value);
    }
  };
  if (t % 2 == 0) {
    std::uniform_int_distribution<int> count(1, 8);
    const int j = count(rng);
    for (int i = 0; i < j; ++i) paint(detail::random_cube(d, rng), 1.0);
  } else {
    std::uniform_real_distribution<double> value(0.05, 1.0);
    double levels[3] = {1.0, value(rng), value(rng)};
    std::sort(levels, levels + 3);
    for (double level : levels) paint(detail::random_cube(d, rng), level);
  }
  return {d, std::move(v)};
}

inline WitnessRatios witness_ratios(const GridFunction& f, const LorentzParams& P) {
  const double base = lambda_norm(f, P);
  if (base == 0.0) return {};
  const LorentzNorms m = lorentz_norms(maximal_fast(f), P);
  return {m.weak / base, m.strong / base};
}

/// Ratios of witnesses 0 .. trials-1, computed concurrently, in index order.
inline std::vector<WitnessRatios> witness_sweep(const LorentzParams& P, std::size_t trials,
                                                std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("need at least one witness");
  return detail::parallel_map<WitnessRatios>(trials, [&](std::size_t t) {
    return witness_ratios(witness_function(P.u().domain(), seed, t), P);
  });
}

struct OpnormEstimate {
  double estimate = 0.0;
  std::size_t witness = 0;
};

inline OpnormEstimate best_witness(std::span<const WitnessRatios> ratios, NormKind kind) {
  OpnormEstimate best;
  for (std::size_t t = 0; t < ratios.size(); ++t) {
    const double r = kind == NormKind::Weak ? ratios[t].weak : ratios[t].strong;
    if (r > best.estimate) best = {r, t};
  }
  return best;
}

/// Lower bound for the operator norm of M from Lambda^p_u(w) to the weak or
/// strong space, as a maximum over seeded witnesses.
inline OpnormEstimate opnorm_estimate(const LorentzParams& P, NormKind kind, std::size_t trials,
                                      std::uint64_t seed) {
  const auto ratios = witness_sweep(P, trials, seed);
  return best_witness(ratios, kind);
}

enum class Growth { Stable, Growing, Indeterminate };

/// Growth thresholds for a sequence of estimates on successive doublings.
/// The defaults call a sequence growing only when every doubling more than
/// doubles the estimate.
struct GrowthCriterion {
  /// Stable: max / min over all levels stays below this.
  double stable_spread = 1.25;
  /// Growing: every doubling multiplies the estimate by more than this ...
  double min_step_factor = 2.0;
  /// ... over at least this many doublings ...
  std::size_t min_doublings = 3;
  /// ... with total growth at least this.
  double min_total_factor = 1.0;

  /// Thresholds sized for polynomial growth n^s with small s, as seen for
  /// power weights just past the critical exponent.
  static GrowthCriterion calibrated() { return {1.25, 1.05, 3, 1.25}; }

  friend bool operator==(const GrowthCriterion&, const GrowthCriterion&) = default;
};

inline Growth classify_growth(std::span<const double> estimates, const GrowthCriterion& g = {}) {
  if (estimates.empty()) return Growth::Indeterminate;
  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  if (*lo > 0.0 && *hi / *lo < g.stable_spread) return Growth::Stable;
  if (estimates.size() < g.min_doublings + 1) return Growth::Indeterminate;
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    if (!(estimates[i] > g.min_step_factor * estimates[i - 1])) return Growth::Indeterminate;
  }
  if (estimates.back() >= g.min_total_factor * estimates.front()) return Growth::Growing;
  return Growth::Indeterminate;
}

enum class Verdict { BothStable, BothGrowing, Boundary, Anomaly, Indeterminate };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::BothStable: return "BOTH-STABLE";
    case Verdict::BothGrowing: return "BOTH-GROWING";
    case Verdict::Boundary: return "BOUNDARY";
    case Verdict::Anomaly: return "ANOMALY";
    case Verdict::Indeterminate: return "INDETERMINATE";
  }
  return "INDETERMINATE";
}

inline std::string to_string(Growth g) {
  switch (g) {
    case Growth::Stable: return "stable";
    case Growth::Growing: return "growing";
    case Growth::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct EquivalenceRow {
  Index level;
  double weak;
  double strong;
  std::size_t weak_witness;
  std::size_t strong_witness;
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  std::string weights;
  double p;
  Growth weak_growth;
  Growth strong_growth;
  Verdict verdict;
};

/// Problem description independent of the grid, materialized per level.
struct EquivalenceSetup {
  int dimension = 1;
  double half_width = 1.0;
  double p = 2.0;
  UWeightSpec u;
  WeightW w = WeightW::power(0.0);
};

/// Operator-norm estimates for both kinds at every level (shared witnesses),
/// and the weak/strong growth classification.
inline EquivalenceReport equivalence_report(const EquivalenceSetup& s, std::span<const Index> levels,
                                            std::size_t trials, std::uint64_t seed,
                                            const GrowthCriterion& g = {}) {
  if (levels.empty()) throw InvalidArgument("equivalence report needs at least one level");
  EquivalenceReport rep;
  rep.p = s.p;
  rep.weights = "u=|x|^" + std::to_string(s.u.alpha) + ", w=" + s.w.describe();
  std::vector<double> weak, strong;
  for (Index n : levels) {
    const GridDomain d(s.dimension, s.half_width, n);
    const LorentzParams P(s.p, s.u.materialize(d), s.w);
    const auto ratios = witness_sweep(P, trials, seed);
    const auto bw = best_witness(ratios, NormKind::Weak);
    const auto bs = best_witness(ratios, NormKind::Strong);
    rep.rows.push_back({n, bw.estimate, bs.estimate, bw.witness, bs.witness});
    weak.push_back(bw.estimate);
    strong.push_back(bs.estimate);
  }
  rep.weak_growth = classify_growth(weak, g);
  rep.strong_growth = classify_growth(strong, g);
  if (s.w.is_power() && s.w.tail_exponent() == s.p - 1.0) {
    rep.verdict = Verdict::Boundary;
  } else if (rep.weak_growth == Growth::Stable && rep.strong_growth == Growth::Stable) {
    rep.verdict = Verdict::BothStable;
  } else if (rep.weak_growth == Growth::Growing && rep.strong_growth == Growth::Growing) {
    rep.verdict = Verdict::BothGrowing;
  } else if (rep.weak_growth != rep.strong_growth && rep.weak_growth != Growth::Indeterminate &&
             rep.strong_growth != Growth::Indeterminate) {
    rep.verdict = Verdict::Anomaly;
  } else {
    rep.verdict = Verdict::Indeterminate;
  }
  return rep;
}

}  // namespace lmax
