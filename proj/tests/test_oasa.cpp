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

#include "nsc/oasa.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "nsc/sweep.hpp"
#include "oracles.hpp"

namespace nsc {
namespace {

OasaConfig config(std::uint64_t seed, std::size_t iters = 10) {
  OasaConfig cfg;
  cfg.seed = RngSeed{seed};
  cfg.max_iters = iters;
  return cfg;
}

double rel_error(const Mat& approx, const Mat& target) {
  Mat d = approx;
  d -= target;
  return fro_norm(d) / fro_norm(target);
}

TEST(Oasa, ExactRankRoundTrip) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Mat m = matmul(gaussian(40, 3, RngSeed{s}), gaussian(3, 25, RngSeed{s + 100}));
    ErrorState st(40, 25);
    const OasaResult res = compress(m, 3, config(s), st, false);
    EXPECT_LT(rel_error(decompress(res.factors), m), 1e-7);
    EXPECT_LT(oracle::orthogonality_defect(res.factors.q), 1e-10);
  }
}

TEST(Oasa, ZeroMatrix) {
  ErrorState st(6, 5);
  const OasaResult res = compress(Mat(6, 5), 2, config(1), st, true);
  EXPECT_EQ(decompress(res.factors), Mat(6, 5));
  EXPECT_EQ(st.residual(), Mat(6, 5));
}

TEST(Oasa, NearOptimalOnPlantedSpectrum) {
  const Mat m = make_planted(64, 48, power_law_spectrum(48, 1.0), RngSeed{3});
  const auto sig = exact_svd(m).sigma;
  ErrorState st(64, 48);
  const OasaResult res = compress(m, 4, config(4), st, false);
  const double opt = oracle::optimal_relative_residual(sig, 4);
  EXPECT_LE(rel_error(decompress(res.factors), m), 1.02 * opt);
  EXPECT_NEAR(res.final_residual, rel_error(decompress(res.factors), m), 1e-9);
}

TEST(Oasa, NearOptimalAcrossSeeds) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t rows = 40 + s % 30, cols = 30 + (s * 7) % 25, r = 1 + s % 6;
    const Mat m = make_planted(rows, cols, power_law_spectrum(std::min(rows, cols), 1.0 + 0.02 * s),
                               RngSeed{1000 + s});
    ErrorState st(rows, cols);
    const OasaResult res = compress(m, r, config(s), st, false);
    const double opt = oracle::optimal_relative_residual(exact_svd(m).sigma, r);
    EXPECT_LE(res.final_residual, 1.05 * opt) << "seed " << s;
    EXPECT_GE(res.final_residual, opt * (1 - 1e-9));
  }
}

TEST(Oasa, DecompressHandCases) {
  const LowRankFactors f{Mat{{1.0}, {2.0}}, Mat{{3.0}, {4.0}, {5.0}}};
  EXPECT_EQ(decompress(f), (Mat{{3, 4, 5}, {6, 8, 10}}));
  EXPECT_EQ(f.rank(), 1U);
  EXPECT_EQ(f.rows(), 2U);
  EXPECT_EQ(f.cols(), 3U);
}

TEST(Oasa, ReturnsBestIterate) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Mat m = gaussian(30, 20, RngSeed{s});
    ErrorState st(30, 20);
    const OasaResult res = compress(m, 3, config(s), st, false);
    ASSERT_EQ(res.residual_history.size(), res.iters_used);
    const double best = *std::min_element(res.residual_history.begin(), res.residual_history.end());
    EXPECT_DOUBLE_EQ(res.final_residual, best);
  }
}

TEST(Oasa, ResidualNonIncreasingWithMoreIterations) {
  const Mat m = make_planted(50, 40, power_law_spectrum(40, 0.7), RngSeed{5});
  double prev = 2.0;
  for (std::size_t t = 1; t <= 6; ++t) {
    OasaConfig cfg = config(9, t);
    cfg.min_iters = t;
    ErrorState st(50, 40);
    const double res = compress(m, 5, cfg, st, false).final_residual;
    EXPECT_LE(res, prev + 1e-12);
    prev = res;
  }
}

TEST(Oasa, EarlyStopRespectsBounds) {
  const Mat m = gaussian(30, 30, RngSeed{6});
  OasaConfig cfg = config(6, 10);
  cfg.stall_tol = 1.0;  // every iteration after the first counts as a stall
  cfg.patience = 1;
  cfg.min_iters = 3;
  ErrorState st(30, 30);
  EXPECT_EQ(compress(m, 2, cfg, st, false).iters_used, 3U);
  cfg.min_iters = 6;
  EXPECT_EQ(compress(m, 2, cfg, st, false).iters_used, 6U);
  cfg.patience = 20;
  EXPECT_EQ(compress(m, 2, cfg, st, false).iters_used, 10U);
}

TEST(Oasa, ErrorStateUpdateOriginal) {
  const Mat m = gaussian(12, 10, RngSeed{7});
  ErrorState st(12, 10);
  OasaConfig cfg = config(7);
  const Mat approx = decompress(compress(m, 2, cfg, st, true).factors);
  Mat expect = m;
  expect -= approx;
  EXPECT_LT(oracle::max_abs_diff(st.residual(), expect), 1e-12);

  // Second call compresses m + E and feeds back beta E + (m - m_hat).
  const Mat e1 = st.residual();
  Mat target = m;
  target += e1;
  const OasaResult r2 = compress(m, 2, cfg, st, true);
  Mat expect2 = e1;
  expect2 *= cfg.beta;
  expect2 += m;
  expect2 -= decompress(r2.factors);
  EXPECT_LT(oracle::max_abs_diff(st.residual(), expect2), 1e-12);
  EXPECT_NEAR(r2.final_residual, rel_error(decompress(r2.factors), target), 1e-9);
}

TEST(Oasa, ErrorStateUpdateCompensated) {
  const Mat m = gaussian(12, 10, RngSeed{8});
  ErrorState st(12, 10);
  OasaConfig cfg = config(8);
  cfg.residual_target = ResidualTarget::kCompensated;
  compress(m, 2, cfg, st, true);
  const Mat e1 = st.residual();
  const OasaResult r2 = compress(m, 2, cfg, st, true);
  Mat expect = e1;
  expect *= cfg.beta;
  expect += m;
  expect += e1;
  expect -= decompress(r2.factors);
  EXPECT_LT(oracle::max_abs_diff(st.residual(), expect), 1e-12);
}

TEST(Oasa, EclOffLeavesStateUntouched) {
  const Mat m = gaussian(12, 10, RngSeed{9});
  ErrorState st(12, 10);
  compress(m, 2, config(9), st, true);
  const Mat before = st.residual();
  compress(gaussian(12, 10, RngSeed{10}), 2, config(9), st, false);
  EXPECT_EQ(st.residual(), before);
}

TEST(Oasa, ResetMatchesFreshState) {
  const Mat m = gaussian(12, 10, RngSeed{11});
  ErrorState used(12, 10);
  compress(m, 2, config(1), used, true);
  reset_error(used);
  reset_error(used);
  EXPECT_EQ(used.residual(), Mat(12, 10));
  ErrorState fresh(12, 10);
  const auto a = compress(m, 2, config(2), used, true);
  const auto b = compress(m, 2, config(2), fresh, true);
  EXPECT_EQ(decompress(a.factors), decompress(b.factors));
  EXPECT_EQ(used.residual(), fresh.residual());
}

TEST(Oasa, ErrorFeedbackRunningAverageConverges) {
  // With beta = 0 and the compensated residual, the mean of the transmitted
  // reconstructions approaches M.
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Mat m = make_planted(32, 24, power_law_spectrum(24, 0.5), RngSeed{300 + s});
    OasaConfig cfg = config(s);
    cfg.beta = 0.0;
    cfg.residual_target = ResidualTarget::kCompensated;
    ErrorState st(32, 24);
    Mat sum(32, 24);
    double first = 0.0, last = 0.0;
    for (int k = 1; k <= 50; ++k) {
      cfg.seed = derive_seed(RngSeed{s}, 1, static_cast<std::uint64_t>(k));
      sum += decompress(compress(m, 2, cfg, st, true).factors);
      Mat avg = sum;
      avg *= 1.0 / k;
      avg -= m;
      (k == 1 ? first : last) = fro_norm(avg);
    }
    EXPECT_LT(last, 0.5 * first);
  }
}

TEST(Oasa, WarmStartIsUsed) {
  const Mat m = make_planted(30, 20, power_law_spectrum(20, 2.0), RngSeed{12});
  const SvdResult exact = exact_svd(m);
  const Mat warm = exact.v.left_columns(3);
  OasaConfig cfg = config(12, 1);
  cfg.min_iters = 1;
  ErrorState st(30, 20);
  const OasaResult res = compress(m, 3, cfg, st, false, warm);
  EXPECT_NEAR(res.final_residual, oracle::optimal_relative_residual(exact.sigma, 3), 1e-9);
}

TEST(Oasa, RejectsBadInput) {
  const Mat m = gaussian(8, 6, RngSeed{13});
  ErrorState st(8, 6);
  EXPECT_THROW(compress(m, 0, config(1), st, false), DimensionError);
  EXPECT_THROW(compress(m, 7, config(1), st, false), DimensionError);
  ErrorState wrong(6, 8);
  EXPECT_THROW(compress(m, 2, config(1), wrong, true), DimensionError);
  EXPECT_THROW(compress(m, 2, config(1), st, false, Mat(6, 3)), DimensionError);
  Mat bad = m;
  bad(0, 0) = std::nan("");
  EXPECT_THROW(compress(bad, 2, config(1), st, false), NonFiniteError);
  OasaConfig cfg = config(1);
  cfg.max_iters = 0;
  EXPECT_THROW(compress(m, 2, cfg, st, false), Error);
  cfg = config(1);
  cfg.beta = 1.5;
  EXPECT_THROW(compress(m, 2, cfg, st, false), Error);
}

}  // namespace
}  // namespace nsc
