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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace nsc {

namespace {

thread_local std::uint64_t g_macs = 0;

std::string shape_str(const Mat& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  g_macs += a.size();
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  g_macs += x.size();
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Columns of `a` as contiguous vectors.
std::vector<std::vector<double>> columns_of(const Mat& a) {
  std::vector<std::vector<double>> cols(a.cols(), std::vector<double>(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) cols[j][i] = a(i, j);
  return cols;
}

Mat from_columns(const std::vector<std::vector<double>>& cols, std::size_t rows) {
  Mat out(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) out(i, j) = cols[j][i];
  return out;
}

// Removes the components of v along basis[0..count), twice.
void project_out(const std::vector<std::vector<double>>& basis, std::size_t count,
                 std::vector<double>& v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < count; ++k) {
      const double c = dot(basis[k], v);
      axpy(-c, basis[k], v);
    }
  }
}

constexpr double kDependenceTol = 1e-10;

}  // namespace

RngSeed derive_seed(RngSeed base, std::uint64_t tag, std::uint64_t counter) {
  std::uint64_t x = splitmix64(base.value ^ 0x6A09E667F3BCC909ULL);
  x = splitmix64(x ^ tag);
  x = splitmix64(x ^ counter);
  return RngSeed{x};
}

// ---- Mat ---------------------------------------------------------------------

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
  if (data_.size() != rows * cols)
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Mat Mat::from_external(std::size_t rows, std::size_t cols, std::vector<double> data) {
  Mat out(rows, cols, std::move(data));
  if (!out.all_finite()) throw NonFiniteError("matrix contains NaN or Inf entries");
  return out;
}

std::vector<double> Mat::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void Mat::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) throw DimensionError("column length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Mat Mat::left_columns(std::size_t count) const {
  if (count == 0 || count > cols_) throw DimensionError("left_columns: bad column count");
  Mat out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_), count,
                out.data_.begin() + static_cast<std::ptrdiff_t>(i * count));
  return out;
}

bool Mat::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Mat& Mat::operator+=(const Mat& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw DimensionError("add: shape " + shape_str(*this) + " vs " + shape_str(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw DimensionError("subtract: shape " + shape_str(*this) + " vs " + shape_str(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Mat& Mat::operator*=(double scale) noexcept {
  for (double& x : data_) x *= scale;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double scale, Mat a) { return a *= scale; }

// ---- products ----------------------------------------------------------------

Mat transpose(const Mat& a) {
  Mat out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: " + shape_str(a) + " * " + shape_str(b));
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto src = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
    }
  }
  g_macs += static_cast<std::uint64_t>(a.rows()) * a.cols() * b.cols();
  return out;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows())
    throw DimensionError("matmul_tn: " + shape_str(a) + "^T * " + shape_str(b));
  Mat out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto arow = a.row(k);
    const auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      auto dst = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aki * brow[j];
    }
  }
  g_macs += static_cast<std::uint64_t>(a.rows()) * a.cols() * b.cols();
  return out;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols())
    throw DimensionError("matmul_nt: " + shape_str(a) + " * " + shape_str(b) + "^T");
  Mat out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto brow = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
      out(i, j) = s;
    }
  }
  g_macs += static_cast<std::uint64_t>(a.rows()) * a.cols() * b.rows();
  return out;
}

double squared_fro_norm(const Mat& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return s;
}

double fro_norm(const Mat& a) { return std::sqrt(squared_fro_norm(a)); }

double mse(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("mse: shape " + shape_str(a) + " vs " + shape_str(b));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

Mat gaussian(std::size_t rows, std::size_t cols, RngSeed seed) {
  Mat out(rows, cols);
  std::mt19937_64 gen(seed.value);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& x : out.data()) x = dist(gen);
  return out;
}

// ---- orthonormalization ------------------------------------------------------

Mat orthonormalize(const Mat& a) {
  if (a.rows() < a.cols())
    throw DimensionError("orthonormalize needs rows >= cols, got " + shape_str(a));
  auto cols = columns_of(a);
  // Replacement directions are a pure function of the shape, so the whole
  // operation stays deterministic.
  std::mt19937_64 gen(derive_seed(RngSeed{a.rows()}, a.cols()).value);
  std::normal_distribution<double> dist(0.0, 1.0);

  for (std::size_t j = 0; j < cols.size(); ++j) {
    auto& v = cols[j];
    const double before = norm2(v);
    project_out(cols, j, v);
    double after = norm2(v);
    while (before == 0.0 || !(after > kDependenceTol * before)) {
      for (double& x : v) x = dist(gen);
      const double fresh = norm2(v);
      project_out(cols, j, v);
      after = norm2(v);
      if (after > kDependenceTol * fresh) break;
    }
    const double inv = 1.0 / after;
    for (double& x : v) x *= inv;
  }
  return from_columns(cols, a.rows());
}

// ---- exact SVD ---------------------------------------------------------------

namespace {

// One-sided Jacobi on a tall matrix (rows >= cols).
SvdResult jacobi_svd_tall(const Mat& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  auto w = columns_of(a);
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  constexpr double kEps = 1e-15;
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double alpha = dot(w[i], w[i]);
        const double beta = dot(w[j], w[j]);
        const double gamma = dot(w[i], w[j]);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double wi = w[i][k];
          const double wj = w[j][k];
          w[i][k] = c * wi - s * wj;
          w[j][k] = s * wi + c * wj;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vi = v[i][k];
          const double vj = v[j][k];
          v[i][k] = c * vi - s * vj;
          v[j][k] = s * vi + c * vj;
        }
        g_macs += 4 * (m + n);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(w[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SvdResult out{Mat(m, n), std::vector<double>(n), Mat(n, n)};
  bool needs_repair = false;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    const double s = norms[j];
    out.sigma[k] = s;
    if (s > 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = w[j][i] / s;
    } else {
      needs_repair = true;
    }
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v[j][i];
  }
  if (needs_repair) out.u = orthonormalize(out.u);
  return out;
}

}  // namespace

SvdResult exact_svd(const Mat& a, std::size_t cap) {
  const std::size_t k = std::min(a.rows(), a.cols());
  if (k > cap)
    throw DimensionError("exact_svd: min dimension " + std::to_string(k) +
                         " exceeds oracle cap " + std::to_string(cap));
  if (a.rows() >= a.cols()) return jacobi_svd_tall(a);
  SvdResult t = jacobi_svd_tall(transpose(a));
  return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

std::uint64_t mac_count() noexcept { return g_macs; }
void reset_mac_count() noexcept { g_macs = 0; }

}  // namespace nsc
