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

#ifndef NSC_RANK_SELECT_HPP
#define NSC_RANK_SELECT_HPP

#include <cstddef>
#include <cstdint>
#include <span>

#include "nsc/spectral.hpp"
#include "nsc/tensor.hpp"

namespace nsc {

/// The byte budget cannot carry even a rank-1 factor pair.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Bandwidth-aware rank policy: energy threshold, per-tensor factor budget in
/// bytes (header excluded), and a hard rank cap.
struct RankPolicy {
  double eta = 0.9;
  std::uint64_t b_max = 1'000'000;
  std::size_t r_cap = 32;

  void validate() const;
};

/// The chosen rank together with the three bounds it was taken from.
struct RankDecision {
  std::size_t r_final = 1;
  std::size_t r_eta = 1;
  std::size_t r_bandwidth = 0;
  std::size_t r_cap = 1;
  double energy_covered = 0.0;
};

/// Smallest r whose leading squared singular values reach `eta` of the total
/// energy, where the total is the sum over all of `sigmas`. An all-zero
/// spectrum yields 1.
std::size_t rank_for_energy(std::span<const double> sigmas, double eta);

/// floor(b_max / (4 (m + n))): the largest rank whose single-precision factor
/// pair fits in b_max bytes. Zero when not even rank 1 fits.
std::size_t rank_for_bandwidth(std::size_t m, std::size_t n, std::uint64_t b_max);

/// Bytes of a rank-r single-precision factor pair for an m x n matrix.
constexpr std::uint64_t factor_bytes(std::size_t m, std::size_t n, std::size_t r) {
  return 4ULL * r * (m + n);
}

/// Estimates the spectrum of `m` and combines the energy, bandwidth and cap
/// bounds into the final rank (their minimum).
///
/// The energy ratio uses ||m||_F^2 as its denominator, which is exact, and the
/// estimated leading sigma_i^2 in the numerator. The probe covers
/// min(r_cap, r_bandwidth, min(m, n) - oversampling) values; when the
/// threshold is not reached inside the probe, r_eta is reported as min(m, n).
/// The probe_rank of `spectral` is overridden by this rule.
///
/// Throws BudgetError when the budget is below a rank-1 payload.
RankDecision select_rank(const Mat& m, const RankPolicy& policy, const SpectralConfig& spectral);

}  // namespace nsc

#endif  // NSC_RANK_SELECT_HPP
