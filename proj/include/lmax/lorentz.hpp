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

// Weighted Lorentz quasi-norms of grid functions by layer cake:
//
//   ||f||^p      = int_0^inf p t^(p-1) W(u({f > t})) dt
//   ||f||_weak   = sup_t t W(u({f > t}))^(1/p)
//
// A grid function takes finitely many values 0 = t_0 < t_1 < ... < t_k, and
// on [t_{i-1}, t_i) the level set is the fixed set {f >= t_i}. Both integrals
// collapse to finite sums over these levels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "lmax/errors.hpp"
#include "lmax/grid.hpp"
#include "lmax/weight_classes.hpp"
#include "lmax/weights.hpp"

namespace lmax {

class LorentzParams {
 public:
  /// Rejects w whose doubling ratio is not finite on [cell volume, u(box)].
  LorentzParams(double p, WeightU u, WeightW w) : p_(p), u_(std::move(u)), w_(std::move(w)) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("Lorentz exponent p must be positive");
    const double lo = u_.domain().cell_volume();
    const double hi = std::max(lo, u_.total());
    delta2_ = delta2_constant_on(w_, std::min(lo, hi), hi);
    if (!std::isfinite(delta2_)) throw InvalidArgument("weight w fails the doubling condition");
  }

  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] const WeightU& u() const { return u_; }
  [[nodiscard]] const WeightW& w() const { return w_; }
  [[nodiscard]] double delta2() const { return delta2_; }

 private:
  double p_;
  WeightU u_;
  WeightW w_;
  double delta2_;
};

/// One layer of the decomposition: on [lower, upper) the level set {f > s}
/// has u-measure `u_mass` and W(u_mass) = `w_mass`.
struct LorentzLayer {
  double lower;
  double upper;
  double u_mass;
  double w_mass;
};

/// Layers in increasing level order; empty for f = 0.
inline std::vector<LorentzLayer> lorentz_layers(const GridFunction& f, const LorentzParams& P) {
  if (!(f.domain() == P.u().domain())) throw DomainMismatch();
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return f.values()[a] > f.values()[b]; });
  // Walk down from the top value accumulating u-mass of {f >= level}.
  const double h = f.domain().cell_volume();
  std::vector<std::pair<double, double>> levels;  // (value, u-sum of {f >= value})
  double acc = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = f.values()[order[i]];
    if (v == 0.0) break;
    while (i < order.size() && f.values()[order[i]] == v) acc += P.u()[static_cast<Index>(order[i++])];
    levels.emplace_back(v, acc);
  }
  std::vector<LorentzLayer> layers;
  layers.reserve(levels.size());
  for (std::size_t k = levels.size(); k-- > 0;) {
    const double lower = k + 1 < levels.size() ? levels[k + 1].first : 0.0;
    const double mass = levels[k].second * h;
    layers.push_back({lower, levels[k].first, mass, P.w().cumulative(mass)});
  }
  return layers;
}

/// Both quasi-norms from one layer decomposition.
struct LorentzNorms {
  double strong;
  double weak;
  double strong_p;  // strong^p, without the final root
  double weak_p;
};

inline LorentzNorms lorentz_norms(const GridFunction& f, const LorentzParams& P) {
  const double p = P.p();
  double sum = 0.0, comp = 0.0, weak_p = 0.0;
  for (const auto& layer : lorentz_layers(f, P)) {
    const double term = (std::pow(layer.upper, p) - std::pow(layer.lower, p)) * layer.w_mass;
    // Neumaier summation.
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    weak_p = std::max(weak_p, std::pow(layer.upper, p) * layer.w_mass);
  }
  // The layer sum dominates each single-level term t_i^p W_i; keep that
  // ordering under rounding.
  const double strong_p = std::max(sum + comp, weak_p);
  return {std::pow(strong_p, 1.0 / p), std::pow(weak_p, 1.0 / p), strong_p, weak_p};
}

inline double lambda_norm(const GridFunction& f, const LorentzParams& P) {
  return lorentz_norms(f, P).strong;
}

inline double lambda_weak_norm(const GridFunction& f, const LorentzParams& P) {
  return lorentz_norms(f, P).weak;
}

}  // namespace lmax
