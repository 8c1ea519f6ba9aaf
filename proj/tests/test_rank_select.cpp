// Copyright 2026 The NSC Authors. All Rights Reserved.
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
// =============================================================================

#include "nsc/rank_select.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nsc/sweep.hpp"
#include "oracles.hpp"

namespace nsc {
namespace {

std::vector<double> halving(std::size_t count, int first_exp) {
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = std::ldexp(1.0, first_exp - static_cast<int>(i));
  return s;
}

SpectralConfig spectral(std::uint64_t seed) {
  SpectralConfig cfg;
  cfg.seed = RngSeed{seed};
  return cfg;
}

TEST(RankForEnergy, HandCases) {
  EXPECT_EQ(rank_for_energy(std::vector<double>{3, 2, 1}, 0.9), 2U);
  EXPECT_EQ(rank_for_energy(std::vector<double>{5, 0, 0}, 0.9), 1U);
  EXPECT_EQ(rank_for_energy(std::vector<double>{1, 1, 1, 1}, 0.5), 2U);
  EXPECT_EQ(rank_for_energy(std::vector<double>{1, 1, 1, 1}, 1.0), 4U);
  EXPECT_EQ(rank_for_energy(std::vector<double>{0, 0}, 0.9), 1U);
}

TEST(RankForEnergy, AgreesWithOracle) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Mat draw = gaussian(1, 12, RngSeed{s});
    std::vector<double> sig(12);
    for (std::size_t i = 0; i < 12; ++i) sig[i] = std::abs(draw(0, i));
    std::sort(sig.rbegin(), sig.rend());
    for (double eta : {0.1, 0.5, 0.9, 0.99}) EXPECT_EQ(rank_for_energy(sig, eta), oracle::energy_rank(sig, eta));
  }
}

TEST(RankForBandwidth, HandCases) {
  EXPECT_EQ(rank_for_bandwidth(512, 256, 1'000'000), 325U);
  EXPECT_EQ(rank_for_bandwidth(1, 1, 8), 1U);
  EXPECT_EQ(rank_for_bandwidth(100, 100, 799), 0U);
  EXPECT_EQ(factor_bytes(128, 64, 8), 6144U);
}

TEST(RankForBandwidth, LargestFittingRank) {
  for (std::size_t m : {3U, 17U, 128U})
    for (std::size_t n : {5U, 64U})
      for (std::uint64_t b : {100ULL, 4096ULL, 77777ULL}) {
        const std::size_t r = rank_for_bandwidth(m, n, b);
        EXPECT_LE(factor_bytes(m, n, r), b);
        EXPECT_GT(factor_bytes(m, n, r + 1), b);
      }
}

TEST(SelectRank, PlantedHalvingSpectrum) {
  const Mat m = make_planted(64, 64, halving(64, 0), RngSeed{1});
  RankPolicy policy;
  policy.eta = 0.9;
  policy.r_cap = 32;
  const RankDecision d = select_rank(m, policy, spectral(2));
  EXPECT_EQ(d.r_final, 2U);
  EXPECT_EQ(d.r_eta, 2U);
  EXPECT_GE(d.energy_covered, 0.9);
  policy.r_cap = 1;
  EXPECT_EQ(select_rank(m, policy, spectral(2)).r_final, 1U);
}

TEST(SelectRank, BandwidthBinds) {
  const Mat m = gaussian(100, 100, RngSeed{3});
  RankPolicy policy;
  policy.eta = 0.999999;
  policy.b_max = 4000;
  policy.r_cap = 32;
  const RankDecision d = select_rank(m, policy, spectral(4));
  EXPECT_EQ(d.r_bandwidth, 5U);
  EXPECT_EQ(d.r_final, 5U);
}

TEST(SelectRank, ZeroMatrix) {
  RankPolicy policy;
  const RankDecision d = select_rank(Mat(20, 10), policy, spectral(5));
  EXPECT_EQ(d.r_final, 1U);
  EXPECT_DOUBLE_EQ(d.energy_covered, 1.0);
}

TEST(SelectRank, BudgetTooSmall) {
  RankPolicy policy;
  policy.b_max = 799;
  EXPECT_THROW(select_rank(gaussian(100, 100, RngSeed{6}), policy, spectral(6)), BudgetError);
}

TEST(SelectRank, InvalidPolicy) {
  RankPolicy policy;
  policy.eta = 0.0;
  EXPECT_THROW(select_rank(gaussian(8, 8, RngSeed{7}), policy, spectral(7)), Error);
  policy.eta = 0.9;
  policy.r_cap = 0;
  EXPECT_THROW(select_rank(gaussian(8, 8, RngSeed{7}), policy, spectral(7)), Error);
}

TEST(SelectRank, FinalIsMinimumOfBoundsAndFitsBudget) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const std::size_t rows = 20 + 7 * (s % 5), cols = 16 + 5 * (s % 3);
    const Mat m = make_planted(rows, cols, power_law_spectrum(std::min(rows, cols), 1.0), RngSeed{s});
    RankPolicy policy;
    policy.eta = 0.5 + 0.015 * static_cast<double>(s);
    policy.b_max = 4 * (rows + cols) * (1 + s % 9);
    policy.r_cap = 1 + s % 12;
    const RankDecision d = select_rank(m, policy, spectral(s));
    EXPECT_EQ(d.r_final, std::min({d.r_eta, d.r_bandwidth, d.r_cap}));
    EXPECT_LE(factor_bytes(rows, cols, d.r_final), policy.b_max);
    EXPECT_GE(d.r_final, 1U);
  }
}

TEST(SelectRank, MonotoneInEtaAndBudget) {
  const Mat m = make_planted(60, 40, power_law_spectrum(40, 0.8), RngSeed{9});
  std::size_t prev = 0;
  for (double eta : {0.3, 0.5, 0.7, 0.8, 0.9}) {
    RankPolicy policy;
    policy.eta = eta;
    const std::size_t r = select_rank(m, policy, spectral(10)).r_final;
    EXPECT_GE(r, prev);
    prev = r;
  }
  prev = 0;
  for (std::uint64_t b : {400ULL, 1200ULL, 4000ULL, 8000ULL, 100000ULL}) {
    RankPolicy policy;
    policy.b_max = b;
    const std::size_t r = select_rank(m, policy, spectral(10)).r_final;
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(SelectRank, EnergyRankMatchesExactSpectrum) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Mat m = make_planted(50, 30, power_law_spectrum(30, 1.5), RngSeed{200 + s});
    const SvdResult exact = exact_svd(m);
    RankPolicy policy;
    policy.eta = 0.85;
    policy.r_cap = 30;
    const RankDecision d = select_rank(m, policy, spectral(s));
    EXPECT_EQ(d.r_eta, oracle::energy_rank(exact.sigma, 0.85));
  }
}

}  // namespace
}  // namespace nsc
