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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nsc {

struct OasaAccess {
  static Mat& residual(ErrorState& s) noexcept { return s.e_; }
};

void OasaConfig::validate() const {
  if (max_iters == 0) throw Error("oasa: max_iters must be positive");
  if (min_iters > max_iters) throw Error("oasa: min_iters exceeds max_iters");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("oasa: beta must lie in [0, 1]");
  if (patience == 0) throw Error("oasa: patience must be positive");
  if (!(stall_tol > 0.0)) throw Error("oasa: stall_tol must be positive");
}

OasaResult compress(const Mat& m, std::size_t r, const OasaConfig& cfg, ErrorState& state,
                    bool ecl_enabled, const std::optional<Mat>& warm_q) {
  cfg.validate();
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (r == 0 || r > std::min(rows, cols))
    throw DimensionError("oasa: rank " + std::to_string(r) + " outside [1, " +
                         std::to_string(std::min(rows, cols)) + "]");
  if (!m.all_finite()) throw NonFiniteError("oasa: input matrix has non-finite entries");
  if (state.shape() != std::pair{rows, cols})
    throw DimensionError("oasa: error state shape " + std::to_string(state.shape().first) + "x" +
                         std::to_string(state.shape().second) + " does not match input " +
                         std::to_string(rows) + "x" + std::to_string(cols));

  Mat& residual = OasaAccess::residual(state);
  const Mat target = ecl_enabled ? m + residual : m;
  const double target_norm = fro_norm(target);

  Mat q;
  if (warm_q) {
    if (warm_q->rows() != cols || warm_q->cols() != r)
      throw DimensionError("oasa: warm start basis has the wrong shape");
    q = *warm_q;
  } else {
    q = orthonormalize(gaussian(cols, r, cfg.seed));
  }

  OasaResult out;
  Mat coef = matmul(target, q);
  double best_recorded = std::numeric_limits<double>::infinity();
  double best_seen = std::numeric_limits<double>::infinity();
  std::size_t stagnant = 0;

  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    const Mat p = orthonormalize(coef);
    q = orthonormalize(matmul_tn(target, p));
    coef = matmul(target, q);

    const double rel = target_norm == 0.0 ? 0.0 : fro_norm(target - matmul_nt(coef, q)) / target_norm;
    out.residual_history.push_back(rel);
    out.iters_used = t;

    if (rel < best_seen) {
      best_seen = rel;
      out.factors = LowRankFactors{coef, q};
      out.final_residual = rel;
    }
    const double improvement =
        std::isinf(best_recorded) ? 1.0
        : best_recorded > 0.0     ? (best_recorded - rel) / best_recorded
                                  : 0.0;
    if (improvement < cfg.stall_tol) {
      ++stagnant;
    } else {
      best_recorded = rel;
      stagnant = 0;
    }
    if (rel == 0.0) break;
    if (stagnant > cfg.patience && t >= cfg.min_iters) break;
  }

  if (ecl_enabled) {
    const Mat approx = decompress(out.factors);
    residual *= cfg.beta;
    residual += (cfg.residual_target == ResidualTarget::kOriginal ? m : target) - approx;
  }
  return out;
}

Mat decompress(const LowRankFactors& f) {
  if (f.p.cols() != f.q.cols()) throw DimensionError("decompress: factor ranks differ");
  return matmul_nt(f.p, f.q);
}

void reset_error(ErrorState& state) noexcept { state.reset(); }

}  // namespace nsc
