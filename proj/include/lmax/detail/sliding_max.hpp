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
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace lmax::detail {

/// Max filter by the van Herk / Gil-Werman block decomposition.
///
/// `vals[j]` is the value attached to position lo + j. For every cell
/// x in [0, n) writes into out[x] the maximum of vals over positions
/// a in [x - k + 1, x] (positions without a value contribute -inf).
/// Scratch buffers are reused across calls.
class CoverMaxFilter {
 public:
  void apply(std::span<const double> vals, std::int64_t lo, std::int64_t k, std::int64_t n,
             std::span<double> out) {
    constexpr double kNone = -std::numeric_limits<double>::infinity();
    // Extended array over positions a = j - k + 1, j in [0, n + k - 1).
    const std::int64_t len = n + k - 1;
    ext_.assign(static_cast<std::size_t>(len), kNone);
    for (std::int64_t j = 0; j < len; ++j) {
      const std::int64_t a = j - k + 1;
      const std::int64_t idx = a - lo;
      if (idx >= 0 && idx < static_cast<std::int64_t>(vals.size())) {
        ext_[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(idx)];
      }
    }
    prefix_.resize(ext_.size());
    suffix_.resize(ext_.size());
    for (std::int64_t j = 0; j < len; ++j) {
      const auto u = static_cast<std::size_t>(j);
      prefix_[u] = (j % k == 0) ? ext_[u] : std::max(prefix_[u - 1], ext_[u]);
    }
    for (std::int64_t j = len - 1; j >= 0; --j) {
      const auto u = static_cast<std::size_t>(j);
      suffix_[u] = (j == len - 1 || (j + 1) % k == 0) ? ext_[u] : std::max(suffix_[u + 1], ext_[u]);
    }
    // Window [x, x + k - 1] in extended coordinates.
    for (std::int64_t x = 0; x < n; ++x) {
      const auto a = static_cast<std::size_t>(x);
      const auto b = static_cast<std::size_t>(x + k - 1);
      out[a] = std::max(suffix_[a], prefix_[b]);
    }
  }

 private:
  std::vector<double> ext_, prefix_, suffix_;
};

}  // namespace lmax::detail
