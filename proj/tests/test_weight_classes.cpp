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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lmax/weight_classes.hpp"
#include "oracles.hpp"

namespace lmax {
namespace {

/// Brute-force A_p constant in long double over all cubes inside the box (1D).
double brute_ap_1d(const WeightU& u, double p) {
  const Index n = u.domain().cells_per_axis();
  long double best = 0.0L;
  for (Index a = 0; a < n; ++a) {
    long double su = 0.0L, sv = 0.0L;
    for (Index b = a; b < n; ++b) {
      su += u[b];
      sv += std::pow(static_cast<long double>(u[b]), -1.0L / (p - 1.0L));
      const long double k = static_cast<long double>(b - a + 1);
      best = std::max(best, (su / k) * std::pow(sv / k, static_cast<long double>(p) - 1.0L));
    }
  }
  return static_cast<double>(best);
}

WeightU random_weight(const GridDomain& d, std::mt19937_64& rng) {
  std::vector<double> v(static_cast<std::size_t>(d.cell_count()));
  std::uniform_real_distribution<double> e(-3.0, 3.0);
  for (auto& x : v) x = std::exp(e(rng));
  return WeightU(GridFunction(d, std::move(v)));
}

CubeFamily single_pair(const GridDomain& d, CubeSpec q, std::vector<Index> subset) {
  GridSet s(d);
  for (Index c : subset) s.insert(c);
  return CubeFamily({{q, s}});
}

TEST(ApConstantTest, LebesgueIsOne) {
  for (double p : {1.5, 2.0, 3.0}) {
    EXPECT_EQ(ap_constant(WeightU::lebesgue(GridDomain(1, 1.0, 32)), p), 1.0);
    EXPECT_EQ(ap_constant(WeightU::lebesgue(GridDomain(2, 1.0, 8)), p), 1.0);
  }
  EXPECT_THROW(ap_constant(WeightU::lebesgue(GridDomain(1, 1.0, 8)), 1.0), InvalidArgument);
}

TEST(ApConstantTest, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const GridDomain d(1, 1.0, std::uniform_int_distribution<Index>(1, 40)(rng));
    const WeightU u = random_weight(d, rng);
    const double p = std::uniform_real_distribution<double>(1.2, 4.0)(rng);
    const double ap = ap_constant(u, p);
    EXPECT_NEAR(ap, brute_ap_1d(u, p), 1e-12 * ap);
    EXPECT_GE(ap, 1.0 - 1e-12);
  }
}

TEST(ApConstantTest, AtLeastOneIn2D) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const WeightU u = random_weight(GridDomain(2, 1.0, 6), rng);
    EXPECT_GE(ap_constant(u, 2.0), 1.0 - 1e-12);
  }
}

TEST(ApConstantTest, SqrtWeightIsRefinementStable) {
  const double coarse = ap_constant(WeightU::power(GridDomain(1, 1.0, 256), 0.5), 2.0);
  const double fine = ap_constant(WeightU::power(GridDomain(1, 1.0, 512), 0.5), 2.0);
  EXPECT_NEAR(coarse, brute_ap_1d(WeightU::power(GridDomain(1, 1.0, 256), 0.5), 2.0), 1e-12 * coarse);
  EXPECT_LT(std::abs(fine / coarse - 1.0), 0.1);
}

TEST(ApConstantTest, LinearWeightGrowsLogarithmically) {
  // At the boundary exponent the constant grows like log n: each doubling
  // adds a roughly constant increment.
  std::vector<double> values;
  for (Index n : {64, 128, 256, 512}) values.push_back(ap_constant(WeightU::power(GridDomain(1, 1.0, n), 1.0), 2.0));
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double step = values[i] - values[i - 1];
    EXPECT_GT(step, 0.5);
    EXPECT_LT(step, 0.75);
  }
}

TEST(A1ConstantTest, Closed) {
  EXPECT_EQ(a1_constant(WeightU::lebesgue(GridDomain(1, 1.0, 32))), 1.0);
  EXPECT_EQ(a1_constant(WeightU::lebesgue(GridDomain(2, 1.0, 6))), 1.0);
}

TEST(A1ConstantTest, RefinementBehavior) {
  const double neg_coarse = a1_constant(WeightU::power(GridDomain(1, 1.0, 256), -0.5));
  const double neg_fine = a1_constant(WeightU::power(GridDomain(1, 1.0, 512), -0.5));
  EXPECT_LT(std::abs(neg_fine / neg_coarse - 1.0), 0.05);
  // Mu stays bounded below near the origin while u(0) ~ h^(1/2).
  const double pos_coarse = a1_constant(WeightU::power(GridDomain(1, 1.0, 256), 0.5));
  const double pos_fine = a1_constant(WeightU::power(GridDomain(1, 1.0, 512), 0.5));
  EXPECT_NEAR(pos_fine / pos_coarse, std::sqrt(2.0), 0.05);
}

TEST(A1ConstantTest, AtLeastOne) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    EXPECT_GE(a1_constant(random_weight(GridDomain(1 + trial % 2, 1.0, 8), rng)), 1.0 - 1e-12);
  }
}

TEST(BpConstantTest, ClosedForms) {
  EXPECT_NEAR(*bp_constant(WeightW::power(0.0), 2.0), 1.0, 1e-12);
  EXPECT_NEAR(*bp_constant(WeightW::power(1.0), 3.0), 2.0, 1e-12);
  for (double alpha : {-0.5, 0.0, 0.5, 1.0}) {
    const double p = alpha + 2.0;
    EXPECT_NEAR(*bp_constant(WeightW::power(alpha), p), (alpha + 1.0) / (p - alpha - 1.0), 1e-9);
    EXPECT_FALSE(bp_constant(WeightW::power(alpha), alpha + 1.0).has_value());
  }
  EXPECT_THROW(bp_constant(WeightW::power(0.0), 0.0), InvalidArgument);
}

TEST(BpConstantTest, PiecewiseFinite) {
  const WeightW w(PiecewiseTailWeight{{1.0, 2.0}, {1.0, 4.0}, 0.0});
  const auto c = bp_constant(w, 2.0);
  ASSERT_TRUE(c.has_value());
  EXPECT_GT(*c, 0.0);
  EXPECT_TRUE(std::isfinite(*c));
}

TEST(BpInfConstantTest, ClosedForms) {
  EXPECT_NEAR(bpinf_constant(WeightW::power(0.0), 1.0), 1.0, 1e-12);
  EXPECT_NEAR(bpinf_constant(WeightW::power(-0.5), 0.5), 1.0, 1e-12);
  EXPECT_NEAR(bpinf_constant(WeightW::power(-0.7), 0.5), 1.0, 1e-12);
  // alpha > p - 1: the sample sup is (t_max / t_min)^(alpha + 1 - p).
  const double small = bpinf_constant(WeightW::power(0.5), 1.0, {-5, 5, 1});
  const double large = bpinf_constant(WeightW::power(0.5), 1.0, {-10, 10, 1});
  EXPECT_NEAR(small, std::pow(1024.0, 0.5), 1e-9 * small);
  EXPECT_NEAR(large, std::pow(1048576.0, 0.5), 1e-9 * large);
  EXPECT_THROW(bpinf_constant(WeightW::power(0.0), 2.0), InvalidArgument);
}

TEST(Delta2ConstantTest, ClosedForms) {
  for (double alpha : {0.0, 1.0, 2.0, -0.5}) {
    EXPECT_NEAR(delta2_constant(WeightW::power(alpha)), std::exp2(alpha + 1.0), 1e-12);
  }
  const WeightW pw(PiecewiseTailWeight{{1.0, 3.0}, {1.0, 5.0}, 0.0});
  const double coarse = delta2_constant(pw, {-10, 10, 4});
  const double fine = delta2_constant(pw, {-10, 10, 16});
  EXPECT_TRUE(std::isfinite(coarse));
  EXPECT_LT(std::abs(fine / coarse - 1.0), 0.1);
}

TEST(RaposoRatioTest, ClosedForms) {
  const GridDomain d(1, 1.0, 16);
  const WeightU u = WeightU::lebesgue(d);
  const WeightW w = WeightW::power(0.0);
  const CubeFamily one = single_pair(d, {{0, 0}, 8}, {1, 2});
  EXPECT_DOUBLE_EQ(raposo_ratio(u, w, one, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(raposo_ratio(u, w, one, 0.5), 2.0);  // (8 / 2)^(1/2)
  const CubeFamily two({{{{0, 0}, 4}, CubeSpec{{0, 0}, 4}.as_set(d)},
                        {{{8, 0}, 4}, CubeSpec{{8, 0}, 4}.as_set(d)}});
  for (double q : {0.3, 1.0, 1.7}) EXPECT_DOUBLE_EQ(raposo_ratio(u, w, two, q), 1.0);
  EXPECT_THROW(raposo_ratio(u, w, one, 0.0), InvalidArgument);
}

TEST(RaposoRatioTest, OverlappingCubesExceedOne) {
  // Q1 = [0, 2), Q2 = [1, 3), S1 = S2 = {1}: (3 / 1) / 2 = 1.5 at q = 1.
  const GridDomain d(1, 1.0, 4);
  GridSet s(d);
  s.insert(1);
  const CubeFamily fam({{{{0, 0}, 2}, s}, {{{1, 0}, 2}, s}});
  EXPECT_DOUBLE_EQ(raposo_ratio(WeightU::lebesgue(d), WeightW::power(0.0), fam, 1.0), 1.5);
}

TEST(CubeFamilyTest, Validation) {
  const GridDomain d(1, 1.0, 8);
  EXPECT_THROW(CubeFamily({}), InvalidArgument);
  EXPECT_THROW(single_pair(d, {{0, 0}, 4}, {}), InvalidArgument);
  EXPECT_THROW(single_pair(d, {{0, 0}, 4}, {5}), InvalidArgument);
  EXPECT_THROW(single_pair(d, {{6, 0}, 4}, {6}), InvalidArgument);
}

TEST(RaposoRatioTest, ApBoundsSinglePairsAtQEqualP) {
  // Hoelder on one cube: u(Q) / u(S) <= [u]_{A_p} (|Q| / |S|)^p.
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    const GridDomain d(1, 1.0, 24);
    const WeightU u = random_weight(d, rng);
    const double p = std::uniform_real_distribution<double>(1.3, 3.0)(rng);
    const double ap = ap_constant(u, p);
    for (int pair = 0; pair < 50; ++pair) {
      const Index side = std::uniform_int_distribution<Index>(1, 24)(rng);
      const CubeSpec q{{std::uniform_int_distribution<Index>(0, 24 - side)(rng), 0}, side};
      GridSet s(d);
      for (Index c = q.lower[0]; c < q.lower[0] + side; ++c) {
        if (std::bernoulli_distribution(0.3)(rng)) s.insert(c);
      }
      if (s.empty()) s.insert(q.lower[0]);
      const double r = raposo_ratio(u, WeightW::power(0.0), CubeFamily({{q, s}}), p);
      ASSERT_LE(r, ap * (1.0 + 1e-12));
    }
  }
}

TEST(RaposoSearchTest, DeterministicAndSelfVerifying) {
  const GridDomain d(1, 1.0, 32);
  const WeightU u = WeightU::power(d, 0.5);
  const WeightW w = WeightW::power(0.5);
  RaposoSearchOptions opt;
  opt.budget = 6;
  opt.seed = 99;
  const auto a = raposo_search(u, w, 2.0, opt);
  const auto b = raposo_search(u, w, 2.0, opt);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ratio, b[i].ratio);
    EXPECT_EQ(a[i].trial, b[i].trial);
    EXPECT_TRUE(a[i].verify(u, w));
    EXPECT_EQ(a[i].level, 32);
    EXPECT_GT(a[i].q, 0.0);
    EXPECT_LT(a[i].q, 2.0);
  }
}

TEST(RaposoSearchTest, MonotoneInBudget) {
  const GridDomain d(1, 1.0, 32);
  const WeightU u = WeightU::power(d, 1.5);
  const WeightW w = WeightW::power(0.0);
  RaposoSearchOptions opt;
  opt.seed = 5;
  opt.q_grid = {0.5, 1.0, 1.5};
  std::vector<double> prev(3, 0.0);
  for (std::size_t budget : {1, 2, 4, 8}) {
    opt.budget = budget;
    const auto certs = raposo_search(u, w, 2.0, opt);
    for (std::size_t i = 0; i < certs.size(); ++i) {
      EXPECT_GE(certs[i].ratio, prev[i]);
      prev[i] = certs[i].ratio;
    }
  }
}

TEST(RaposoSearchTest, LebesgueSanityMatchesExhaustive) {
  const GridDomain d(1, 1.0, 16);
  RaposoSearchOptions opt;
  opt.q_grid = {1.0};
  opt.seed = 3;
  opt.budget = 64;
  const auto certs = raposo_search(WeightU::lebesgue(d), WeightW::power(0.0), 2.0, opt);
  const double exhaustive = testing::exhaustive_lebesgue_raposo(16, 1.0);
  EXPECT_LE(certs[0].ratio, 1.0 + 1e-9);
  EXPECT_DOUBLE_EQ(exhaustive, 1.0);
  EXPECT_DOUBLE_EQ(certs[0].ratio, exhaustive);
}

TEST(RaposoSearchTest, ExhaustiveOracleAtSmallerQ) {
  // At q = 1/2 the single pair (16 cells, 1 cell) gives 16^(1/2) = 4.
  EXPECT_DOUBLE_EQ(testing::exhaustive_lebesgue_raposo(16, 0.5), 4.0);
  const GridDomain d(1, 1.0, 16);
  RaposoSearchOptions opt;
  opt.q_grid = {0.5};
  opt.budget = 16;
  const auto certs = raposo_search(WeightU::lebesgue(d), WeightW::power(0.0), 2.0, opt);
  EXPECT_DOUBLE_EQ(certs[0].ratio, 4.0);
}

TEST(RaposoSearchTest, PowerWeightsAcrossRefinement) {
  RaposoSearchOptions opt;
  opt.q_grid = {16.0 / 9.0};
  opt.budget = 16;
  opt.seed = 1;
  std::vector<double> inside, outside;
  for (Index n : {16, 32, 64, 128}) {
    const GridDomain d(1, 1.0, n);
    inside.push_back(raposo_search(WeightU::power(d, 0.5), WeightW::power(0.0), 2.0, opt)[0].ratio);
    outside.push_back(raposo_search(WeightU::power(d, 1.5), WeightW::power(0.0), 2.0, opt)[0].ratio);
  }
  for (std::size_t i = 1; i < inside.size(); ++i) {
    // u = |x|^(1/2) is in A_2: the ratio at this q stays put.
    EXPECT_LT(std::abs(inside[i] / inside[i - 1] - 1.0), 0.1);
    // u = |x|^(3/2): the one-pair family around the origin grows like
    // n^(5/2 - q), a factor near 2^(0.72) per doubling.
    EXPECT_GT(outside[i] / outside[i - 1], 1.5);
  }
}

TEST(RaposoSearchTest, RejectsBadOptions) {
  const GridDomain d(1, 1.0, 8);
  RaposoSearchOptions opt;
  opt.budget = 0;
  EXPECT_THROW(raposo_search(WeightU::lebesgue(d), WeightW::power(0.0), 2.0, opt), InvalidArgument);
  opt.budget = 1;
  opt.q_grid = {-1.0};
  EXPECT_THROW(raposo_search(WeightU::lebesgue(d), WeightW::power(0.0), 2.0, opt), InvalidArgument);
}

TEST(DefaultQGridTest, EightInteriorPoints) {
  const auto q = default_q_grid(2.0);
  ASSERT_EQ(q.size(), 8u);
  EXPECT_GT(q.front(), 0.0);
  EXPECT_LT(q.back(), 2.0);
}

}  // namespace
}  // namespace lmax
