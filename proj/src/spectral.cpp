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

#include "nsc/spectral.hpp"

#include <algorithm>
#include <string>

namespace nsc {

void SpectralConfig::validate(std::size_t m, std::size_t n) const {
  if (probe_rank == 0) throw DimensionError("spectral: probe_rank must be positive");
  if (power_iters > kMaxPowerIters)
    throw DimensionError("spectral: power_iters " + std::to_string(power_iters) + " exceeds cap " +
                         std::to_string(kMaxPowerIters));
  if (probe_rank + oversampling > std::min(m, n))
    throw DimensionError("spectral: probe_rank + oversampling = " +
                         std::to_string(probe_rank + oversampling) + " exceeds min(m, n) = " +
                         std::to_string(std::min(m, n)));
}

SpectralEstimate estimate_spectrum(const Mat& m, const SpectralConfig& cfg) {
  cfg.validate(m.rows(), m.cols());
  const std::size_t width = cfg.probe_rank + cfg.oversampling;

  const Mat omega = gaussian(m.cols(), width, cfg.seed);
  Mat q = orthonormalize(matmul(m, omega));
  for (std::size_t round = 0; round < cfg.power_iters; ++round) {
    const Mat z = orthonormalize(matmul_tn(m, q));
    q = orthonormalize(matmul(m, z));
  }

  // B = Q^T M is only `width` rows tall, so its exact SVD is cheap.
  const Mat b = matmul_tn(q, m);
  const SvdResult small = exact_svd(b);

  SpectralEstimate out;
  out.sigmas.assign(small.sigma.begin(),
                    small.sigma.begin() + static_cast<std::ptrdiff_t>(cfg.probe_rank));
  out.u = matmul(q, small.u.left_columns(cfg.probe_rank));
  out.v = small.v.left_columns(cfg.probe_rank);
  return out;
}

}  // namespace nsc
