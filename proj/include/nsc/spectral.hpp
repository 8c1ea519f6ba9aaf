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

#ifndef NSC_SPECTRAL_HPP
#define NSC_SPECTRAL_HPP

#include <cstddef>
#include <vector>

#include "nsc/tensor.hpp"

namespace nsc {

/// Knobs of the randomized spectral estimator.
///
/// The probe draws probe_rank + oversampling Gaussian directions. Each power
/// round multiplies by M^T and then by M, orthonormalizing after each half
/// step; zero rounds means the plain sketch Y = M * Omega. Rounds are capped
/// at kMaxPowerIters.
struct SpectralConfig {
  static constexpr std::size_t kMaxPowerIters = 8;

  std::size_t probe_rank = 8;
  std::size_t oversampling = 8;
  std::size_t power_iters = 2;
  RngSeed seed{0x5EED};

  /// Throws DimensionError unless the config fits an m x n target.
  void validate(std::size_t m, std::size_t n) const;
};

struct SpectralEstimate {
  std::vector<double> sigmas;  // probe_rank values, non-increasing
  Mat u;                       // m x probe_rank, orthonormal columns
  Mat v;                       // n x probe_rank, orthonormal columns
};

/// Estimates the leading singular triplets of `m` from a randomized range
/// sketch. Cost is O(m n (probe_rank + oversampling)) per power round.
SpectralEstimate estimate_spectrum(const Mat& m, const SpectralConfig& cfg);

}  // namespace nsc

#endif  // NSC_SPECTRAL_HPP
