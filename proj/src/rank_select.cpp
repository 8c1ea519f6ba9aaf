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

#include <algorithm>
#include <optional>
#include <string>

namespace nsc {

namespace {

// Smallest r with sum_{i<=r} sigma_i^2 / total >= eta, if any.
std::optional<std::size_t> first_rank_reaching(std::span<const double> sigmas, double eta,
                                               double total) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    cumulative += sigmas[i] * sigmas[i];
    if (cumulative / total >= eta) return i + 1;
  }
  return std::nullopt;
}

}  // namespace

void RankPolicy::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw Error("rank policy: eta must lie in (0, 1)");
  if (b_max == 0) throw Error("rank policy: b_max must be positive");
  if (r_cap == 0) throw Error("rank policy: r_cap must be positive");
}

std::size_t rank_for_energy(std::span<const double> sigmas, double eta) {
  double total = 0.0;
  for (double s : sigmas) total += s * s;
  if (total == 0.0) return 1;
  // Rounding can leave the full sum a hair under eta only if eta ~ 1.
  return first_rank_reaching(sigmas, eta, total).value_or(sigmas.size());
}

std::size_t rank_for_bandwidth(std::size_t m, std::size_t n, std::uint64_t b_max) {
  return static_cast<std::size_t>(b_max / factor_bytes(m, n, 1));
}

RankDecision select_rank(const Mat& m, const RankPolicy& policy, const SpectralConfig& spectral) {
  policy.validate();
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const std::size_t min_dim = std::min(rows, cols);

  RankDecision d;
  d.r_cap = policy.r_cap;
  d.r_bandwidth = rank_for_bandwidth(rows, cols, policy.b_max);
  if (d.r_bandwidth == 0)
    throw BudgetError("budget below rank-1 payload: " + std::to_string(policy.b_max) +
                      " bytes < " + std::to_string(factor_bytes(rows, cols, 1)) + " for " +
                      std::to_string(rows) + "x" + std::to_string(cols));

  const std::size_t feasible = std::min({policy.r_cap, d.r_bandwidth, min_dim});
  SpectralConfig probe = spectral;
  probe.oversampling = std::min(spectral.oversampling, min_dim - 1);
  probe.probe_rank = std::max<std::size_t>(1, std::min(feasible, min_dim - probe.oversampling));

  const double total = squared_fro_norm(m);
  std::vector<double> sigmas;
  if (total == 0.0) {
    d.r_eta = 1;
  } else {
    sigmas = estimate_spectrum(m, probe).sigmas;
    d.r_eta = first_rank_reaching(sigmas, policy.eta, total).value_or(min_dim);
  }

  d.r_final = std::min({d.r_eta, d.r_bandwidth, d.r_cap});
  if (total == 0.0) {
    d.energy_covered = 1.0;
  } else {
    double covered = 0.0;
    for (std::size_t i = 0; i < std::min(d.r_final, sigmas.size()); ++i)
      covered += sigmas[i] * sigmas[i];
    d.energy_covered = std::min(1.0, covered / total);
  }
  return d;
}

}  // namespace nsc
