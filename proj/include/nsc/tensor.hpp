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

#ifndef NSC_TENSOR_HPP
#define NSC_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of the operands do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix handed in from outside contains NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Seed for every random draw in the library. Equal seeds give bit-identical
/// draws on the same standard library.
struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(RngSeed, RngSeed) = default;
};

/// Mixes a base seed with a stream tag and a counter (splitmix64 finalizer).
RngSeed derive_seed(RngSeed base, std::uint64_t tag, std::uint64_t counter = 0);

/// Dense row-major matrix of doubles. Both dimensions are at least one.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> data);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat identity(std::size_t n);
  /// Validating constructor for external data: rejects NaN/Inf.
  static Mat from_external(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::vector<double> column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);
  /// Leading `count` columns.
  Mat left_columns(std::size_t count) const;

  bool all_finite() const noexcept;

  Mat& operator+=(const Mat& other);
  Mat& operator-=(const Mat& other);
  Mat& operator*=(double scale) noexcept;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double scale, Mat a);

Mat transpose(const Mat& a);

/// a * b. Throws DimensionError when a.cols() != b.rows().
Mat matmul(const Mat& a, const Mat& b);
/// a^T * b without forming the transpose.
Mat matmul_tn(const Mat& a, const Mat& b);
/// a * b^T without forming the transpose.
Mat matmul_nt(const Mat& a, const Mat& b);

double fro_norm(const Mat& a);
double squared_fro_norm(const Mat& a);
/// Mean of squared entry-wise differences.
double mse(const Mat& a, const Mat& b);

/// i.i.d. N(0, 1) entries; a pure function of (rows, cols, seed).
Mat gaussian(std::size_t rows, std::size_t cols, RngSeed seed);

/// Orthonormal basis for the column span of `a` (rows >= cols) by modified
/// Gram-Schmidt with one re-orthogonalization pass. Columns that turn out
/// numerically dependent on their predecessors, including zero columns, are
/// replaced by random directions orthogonal to the basis built so far, so the
/// result always has exactly a.cols() orthonormal columns.
Mat orthonormalize(const Mat& a);

struct SvdResult {
  Mat u;                      // rows x k
  std::vector<double> sigma;  // k values, non-increasing
  Mat v;                      // cols x k
};

inline constexpr std::size_t kDefaultOracleCap = 512;

/// Thin SVD by one-sided Jacobi rotations, k = min(rows, cols). This is the
/// exact reference used by tests, benchmarks and the small projected problem
/// of the spectral estimator; it refuses inputs with min(rows, cols) > cap.
SvdResult exact_svd(const Mat& a, std::size_t cap = kDefaultOracleCap);

/// Multiply-accumulate operations performed on the calling thread by the
/// dense kernels above since the last reset.
std::uint64_t mac_count() noexcept;
void reset_mac_count() noexcept;

}  // namespace nsc

#endif  // NSC_TENSOR_HPP
