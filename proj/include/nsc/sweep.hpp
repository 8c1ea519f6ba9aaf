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

#ifndef NSC_SWEEP_HPP
#define NSC_SWEEP_HPP

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "nsc/baselines.hpp"
#include "nsc/sim_config.hpp"
#include "nsc/tensor.hpp"

namespace nsc {

/// sigma_i = i^-decay for i = 1..count.
std::vector<double> power_law_spectrum(std::size_t count, double decay);

/// U diag(sigmas) V^T with random orthonormal U (rows x k) and V (cols x k).
Mat make_planted(std::size_t rows, std::size_t cols, std::span<const double> sigmas, RngSeed seed);

/// Bytes a `bandwidth_mbps` link moves in `slot_s` seconds (1 Mbps = 1e6 bit/s).
std::uint64_t budget_for_bandwidth(double bandwidth_mbps, double slot_s);

struct SweepCell {
  Variant compressor = Variant::kNsc;
  double bandwidth_mbps = 0.0;
  std::uint64_t budget = 0;
  bool feasible = true;     // false when the budget cannot carry this variant at all
  double mean_mse = 0.0;
  double mean_bytes = 0.0;  // full wire messages, header included
  double mean_rank = 0.0;   // rank, kept entries, or bit width
  std::vector<double> mse;  // per corpus matrix
};

/// The planted-spectrum corpus a sweep evaluates: cfg.sweep_corpus matrices of
/// cfg.sweep_rows x cfg.sweep_cols with power-law spectra.
std::vector<Mat> sweep_corpus(const sim::SimConfig& cfg);

/// Mean reconstruction MSE of each (compressor, bandwidth) cell on the corpus.
/// nsc runs without error feedback and with cfg.sweep_eta. Cells are computed
/// on up to `workers` threads; output order is compressors-major, fixed.
std::vector<SweepCell> run_sweep(const sim::SimConfig& cfg, std::span<const double> bandwidths_mbps,
                                 std::span<const Variant> compressors, std::size_t workers = 1);

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

}  // namespace nsc

#endif  // NSC_SWEEP_HPP
