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

#ifndef NSC_OASA_HPP
#define NSC_OASA_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "nsc/tensor.hpp"

namespace nsc {

/// What the error-feedback residual is measured against.
enum class ResidualTarget {
  kOriginal,     // E <- beta E + (M - M_hat)
  kCompensated,  // E <- beta E + (M + E - M_hat)
};

struct OasaConfig {
  std::size_t max_iters = 10;
  double beta = 0.9;
  std::size_t min_iters = 2;
  std::size_t patience = 2;
  double stall_tol = 1e-3;
  RngSeed seed{0x0A5A};
  ResidualTarget residual_target = ResidualTarget::kOriginal;

  void validate() const;
};

/// Error-feedback memory of one compressed stream.
class ErrorState {
 public:
  ErrorState(std::size_t rows, std::size_t cols) : e_(rows, cols) {}

  const Mat& residual() const noexcept { return e_; }
  std::pair<std::size_t, std::size_t> shape() const noexcept { return {e_.rows(), e_.cols()}; }
  void reset() noexcept { e_ *= 0.0; }

 private:
  friend struct OasaAccess;
  Mat e_;
};

/// p (m x r) carries the magnitudes, q (n x r) has orthonormal columns.
struct LowRankFactors {
  Mat p;
  Mat q;

  std::size_t rank() const noexcept { return q.cols(); }
  std::size_t rows() const noexcept { return p.rows(); }
  std::size_t cols() const noexcept { return q.rows(); }
};

struct OasaResult {
  LowRankFactors factors;
  std::size_t iters_used = 0;
  double final_residual = 0.0;          // relative to ||M'||_F for the returned factors
  std::vector<double> residual_history;  // one entry per iteration
};

/// Rank-r approximation of m (plus the stream's residual when ecl is on) by
/// alternating orthonormal subspace iteration.
///
/// Each iteration orthonormalizes M' Q into the left basis and M'^T P into the
/// right basis, then measures ||M' - M' Q Q^T|| / ||M'||. Iteration stops after
/// max_iters, or once the relative improvement over the best recorded residual
/// has stayed below stall_tol for more than `patience` iterations and at least
/// min_iters have run. The lowest-residual iterate is returned as
/// (M' Q, Q), so the reconstruction is the projection of M' onto span(Q).
///
/// `warm_q`, when given, must be n x r with orthonormal columns and replaces
/// the random starting basis.
OasaResult compress(const Mat& m, std::size_t r, const OasaConfig& cfg, ErrorState& state,
                    bool ecl_enabled, const std::optional<Mat>& warm_q = std::nullopt);

/// p * q^T.
Mat decompress(const LowRankFactors& f);

/// Zeroes the stream's residual.
void reset_error(ErrorState& state) noexcept;

}  // namespace nsc

#endif  // NSC_OASA_HPP
