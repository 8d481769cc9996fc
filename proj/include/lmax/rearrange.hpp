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

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "lmax/errors.hpp"
#include "lmax/grid.hpp"

namespace lmax {

/// Right-continuous nonincreasing step function on [0, inf):
/// values[i] on [breakpoints[i-1], breakpoints[i]) with a leading 0, and 0
/// after the last breakpoint.
class DecreasingStep {
 public:
  DecreasingStep() = default;

  DecreasingStep(std::vector<double> breakpoints, std::vector<double> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() != values_.size()) {
      throw InvalidArgument("step function needs one value per breakpoint");
    }
    double prev_t = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(breakpoints_[i] > prev_t)) throw InvalidArgument("breakpoints must increase from 0");
      if (!(values_[i] >= 0.0)) throw InvalidArgument("step values must be nonnegative");
      if (i > 0 && values_[i] > values_[i - 1]) throw InvalidArgument("step values must not increase");
      prev_t = breakpoints_[i];
    }
  }

  [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  /// End of the support.
  [[nodiscard]] double support() const { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }

  [[nodiscard]] double operator()(double t) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it == breakpoints_.end()) return 0.0;
    return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }

  /// Integral over [0, t].
  [[nodiscard]] double integral(double t) const {
    double acc = 0.0, left = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double right = breakpoints_[i];
      if (t <= right) return acc + values_[i] * (t - left);
      acc += values_[i] * (right - left);
      left = right;
    }
    return acc;
  }

  /// Lebesgue measure of {g > s}.
  [[nodiscard]] double distribution(double s) const {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size() && values_[i] > s; ++i) m = breakpoints_[i];
    return m;
  }

  DecreasingStep scaled(double c) const {
    if (!(c >= 0.0)) throw InvalidArgument("scale must be nonnegative");
    if (c == 0.0) return {};
    std::vector<double> v = values_;
    for (double& x : v) x *= c;
    return {breakpoints_, std::move(v)};
  }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// |{f > t}|.
inline double distribution(const GridFunction& f, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("distribution needs t >= 0");
  const auto count = std::count_if(f.values().begin(), f.values().end(), [t](double v) { return v > t; });
  return static_cast<double>(count) * f.domain().cell_volume();
}

/// f*: cell values sorted in decreasing order, each carrying one cell volume.
/// Equal values merge into one step; zero values are dropped.
inline DecreasingStep rearrangement(const GridFunction& f) {
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return f.values()[a] > f.values()[b]; });
  const double h = f.domain().cell_volume();
  std::vector<double> bps, vals;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = f.values()[order[i]];
    if (v == 0.0) break;
    std::size_t j = i;
    while (j < order.size() && f.values()[order[j]] == v) ++j;
    bps.push_back(static_cast<double>(j) * h);
    vals.push_back(v);
    i = j;
  }
  return {std::move(bps), std::move(vals)};
}

/// Hardy operator: (1/t) * integral of g over [0, t].
inline double hardy(const DecreasingStep& g, double t) {
  if (!(t > 0.0)) throw InvalidArgument("Hardy operator needs t > 0");
  return g.integral(t) / t;
}

}  // namespace lmax
