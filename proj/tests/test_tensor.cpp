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

#include "nsc/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace nsc {
namespace {

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Mat a = gaussian(3, 5, RngSeed{1});
  EXPECT_EQ(matmul(Mat::identity(3), a), a);
}

TEST(Matmul, HandComputedProduct) {
  const Mat out = matmul(Mat{{1, 2}, {3, 4}}, Mat{{0}, {1}});
  EXPECT_EQ(out, (Mat{{2}, {4}}));
}

TEST(Matmul, MatchesTripleLoopOracle) {
  const Mat a = gaussian(7, 5, RngSeed{2});
  const Mat b = gaussian(5, 3, RngSeed{3});
  EXPECT_LT(oracle::max_abs_diff(matmul(a, b), oracle::naive_matmul(a, b)), 1e-12);
}

TEST(Matmul, TransposedVariantsAgree) {
  const Mat a = gaussian(6, 4, RngSeed{4});
  const Mat b = gaussian(6, 3, RngSeed{5});
  const Mat c = gaussian(5, 4, RngSeed{6});
  EXPECT_LT(oracle::max_abs_diff(matmul_tn(a, b), oracle::naive_matmul(transpose(a), b)), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(matmul_nt(a, c), oracle::naive_matmul(a, transpose(c))), 1e-12);
}

TEST(Matmul, DimensionMismatchThrows) {
  EXPECT_THROW(matmul(Mat(2, 3), Mat(2, 3)), DimensionError);
  EXPECT_THROW(matmul_tn(Mat(2, 3), Mat(3, 3)), DimensionError);
}

TEST(Matmul, AssociativeOnRandomTriples) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Mat a = gaussian(4 + s % 5, 6, RngSeed{s});
    const Mat b = gaussian(6, 3 + s % 4, RngSeed{s + 100});
    const Mat c = gaussian(3 + s % 4, 5, RngSeed{s + 200});
    const Mat left = matmul(matmul(a, b), c);
    const Mat right = matmul(a, matmul(b, c));
    EXPECT_LT(fro_norm(left - right), 1e-9 * fro_norm(left));
  }
}

TEST(MatConstruction, RejectsZeroDimsAndNonFiniteExternalData) {
  EXPECT_THROW(Mat(0, 3), DimensionError);
  EXPECT_THROW(Mat(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  EXPECT_THROW(Mat::from_external(1, 2, {1.0, std::nan("")}), NonFiniteError);
  EXPECT_THROW(Mat::from_external(1, 1, {INFINITY}), NonFiniteError);
  EXPECT_NO_THROW(Mat::from_external(1, 2, {1.0, -2.0}));
}

TEST(FroNorm, KnownValues) {
  EXPECT_EQ(fro_norm(Mat(3, 4)), 0.0);
  EXPECT_DOUBLE_EQ(fro_norm(Mat{{3, 4}}), 5.0);
}

TEST(FroNorm, MatchesSumOfSquaresOracle) {
  const Mat a = gaussian(31, 17, RngSeed{9});
  const double expected = std::sqrt(oracle::naive_sum_squares(a));
  EXPECT_NEAR(fro_norm(a), expected, 1e-12 * expected);
}

TEST(Gaussian, DeterministicPerSeed) {
  EXPECT_EQ(gaussian(8, 9, RngSeed{42}), gaussian(8, 9, RngSeed{42}));
  EXPECT_NE(gaussian(8, 9, RngSeed{42}), gaussian(8, 9, RngSeed{43}));
}

TEST(Gaussian, MomentsOfTenThousandSamples) {
  const Mat g = gaussian(100, 100, RngSeed{7});
  double mean = 0.0;
  for (double x : g.data()) mean += x;
  mean /= static_cast<double>(g.size());
  double var = 0.0;
  for (double x : g.data()) var += (x - mean) * (x - mean);
  var /= static_cast<double>(g.size() - 1);
  EXPECT_GT(mean, -0.05);
  EXPECT_LT(mean, 0.05);
  EXPECT_GT(var, 0.9);
  EXPECT_LT(var, 1.1);
}

TEST(Orthonormalize, NormalizesSingleColumn) {
  const Mat q = orthonormalize(Mat{{3}, {4}});
  EXPECT_NEAR(std::abs(q(0, 0)), 0.6, 1e-15);
  EXPECT_NEAR(std::abs(q(1, 0)), 0.8, 1e-15);
}

TEST(Orthonormalize, IdempotentOnOrthonormalInput) {
  const Mat q = orthonormalize(gaussian(20, 5, RngSeed{11}));
  const Mat again = orthonormalize(q);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    const double sign = q(0, j) * again(0, j) >= 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < q.rows(); ++i) EXPECT_NEAR(again(i, j), sign * q(i, j), 1e-13);
  }
}

TEST(Orthonormalize, RandomTallMatrixSpansSameSpace) {
  const Mat a = gaussian(50, 8, RngSeed{12});
  const Mat q = orthonormalize(a);
  EXPECT_LT(oracle::orthogonality_defect(q), 1e-10);
  const Mat projected = matmul(q, matmul_tn(q, a));
  EXPECT_LT(oracle::max_abs_diff(projected, a), 1e-9);
}

TEST(Orthonormalize, PropertyOverRandomSizes) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const std::size_t rows = 2 + (s * 37) % 199;
    const std::size_t cols = 1 + (s * 13) % rows;
    const Mat q = orthonormalize(gaussian(rows, std::min<std::size_t>(cols, 60), RngSeed{s}));
    EXPECT_LT(oracle::orthogonality_defect(q), 1e-10) << rows << "x" << cols;
  }
}

TEST(Orthonormalize, RepairsRankDeficientInput) {
  Mat a = gaussian(10, 4, RngSeed{13});
  for (std::size_t i = 0; i < 10; ++i) {
    a(i, 2) = 2.0 * a(i, 0) - a(i, 1);  // dependent
    a(i, 3) = 0.0;                      // zero
  }
  const Mat q = orthonormalize(a);
  EXPECT_LT(oracle::orthogonality_defect(q), 1e-10);
  // The independent columns are still spanned.
  const Mat lead = a.left_columns(2);
  EXPECT_LT(oracle::max_abs_diff(matmul(q, matmul_tn(q, lead)), lead), 1e-9);
}

TEST(Orthonormalize, ZeroInputGivesRandomBasis) {
  const Mat q = orthonormalize(Mat(6, 3));
  EXPECT_LT(oracle::orthogonality_defect(q), 1e-10);
  EXPECT_EQ(q, orthonormalize(Mat(6, 3)));
}

TEST(Orthonormalize, WideInputThrows) { EXPECT_THROW(orthonormalize(Mat(2, 3)), DimensionError); }

TEST(ExactSvd, DiagonalMatrix) {
  const SvdResult r = exact_svd(Mat{{1, 0, 0}, {0, 3, 0}, {0, 0, 2}});
  ASSERT_EQ(r.sigma.size(), 3U);
  EXPECT_NEAR(r.sigma[0], 3.0, 1e-14);
  EXPECT_NEAR(r.sigma[1], 2.0, 1e-14);
  EXPECT_NEAR(r.sigma[2], 1.0, 1e-14);
}

TEST(ExactSvd, ConstructedRankTwoSpectrum) {
  const Mat u = orthonormalize(gaussian(7, 2, RngSeed{20}));
  const Mat v = orthonormalize(gaussian(5, 2, RngSeed{21}));
  Mat a(7, 5);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 5; ++j) a(i, j) = 5.0 * u(i, 0) * v(j, 0) + 2.0 * u(i, 1) * v(j, 1);
  const SvdResult r = exact_svd(a);
  EXPECT_NEAR(r.sigma[0], 5.0, 1e-12);
  EXPECT_NEAR(r.sigma[1], 2.0, 1e-12);
  for (std::size_t k = 2; k < r.sigma.size(); ++k) EXPECT_NEAR(r.sigma[k], 0.0, 1e-12);
  EXPECT_LT(oracle::orthogonality_defect(r.u), 1e-10);
}

TEST(ExactSvd, RandomMatrixAgainstGramEigenvalues) {
  for (const auto& [rows, cols] : {std::pair{20, 12}, std::pair{12, 20}}) {
    const Mat a = gaussian(rows, cols, RngSeed{22});
    const SvdResult r = exact_svd(a);
    Mat us = r.u;
    for (std::size_t i = 0; i < us.rows(); ++i)
      for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= r.sigma[j];
    EXPECT_LT(fro_norm(a - matmul_nt(us, r.v)), 1e-8 * fro_norm(a));
    EXPECT_LT(oracle::orthogonality_defect(r.u), 1e-10);
    EXPECT_LT(oracle::orthogonality_defect(r.v), 1e-10);
    const auto expected = oracle::gram_singular_values(a);
    for (std::size_t k = 0; k < r.sigma.size(); ++k) {
      EXPECT_NEAR(r.sigma[k], expected[k], 1e-9 * expected[0]);
      if (k > 0) EXPECT_LE(r.sigma[k], r.sigma[k - 1]);
    }
  }
}

TEST(ExactSvd, ReconstructsRankDeficientMatrices) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Mat a = matmul(gaussian(15, 3, RngSeed{s}), gaussian(3, 9, RngSeed{s + 50}));
    const SvdResult r = exact_svd(a);
    Mat us = r.u;
    for (std::size_t i = 0; i < us.rows(); ++i)
      for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= r.sigma[j];
    EXPECT_LT(fro_norm(a - matmul_nt(us, r.v)), 1e-8 * fro_norm(a));
    EXPECT_LT(oracle::orthogonality_defect(r.u), 1e-10);
  }
}

TEST(ExactSvd, RefusesInputsAboveOracleCap) {
  EXPECT_THROW(exact_svd(Mat(20, 20), 10), DimensionError);
  EXPECT_NO_THROW(exact_svd(Mat(20, 10), 10));
}

TEST(MacCounter, CountsProductWork) {
  reset_mac_count();
  (void)matmul(Mat(4, 5), Mat(5, 6));
  EXPECT_EQ(mac_count(), 4U * 5U * 6U);
  reset_mac_count();
  EXPECT_EQ(mac_count(), 0U);
}

}  // namespace
}  // namespace nsc
