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

#include "nsc/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

namespace nsc {

std::vector<double> power_law_spectrum(std::size_t count, double decay) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::pow(static_cast<double>(i + 1), -decay);
  return out;
}

Mat make_planted(std::size_t rows, std::size_t cols, std::span<const double> sigmas, RngSeed seed) {
  const std::size_t k = sigmas.size();
  if (k == 0 || k > std::min(rows, cols)) throw DimensionError("make_planted: bad spectrum length");
  const Mat u = orthonormalize(gaussian(rows, k, derive_seed(seed, 1)));
  Mat v = orthonormalize(gaussian(cols, k, derive_seed(seed, 2)));
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < k; ++j) v(i, j) *= sigmas[j];
  return matmul_nt(u, v);
}

std::uint64_t budget_for_bandwidth(double bandwidth_mbps, double slot_s) {
  return static_cast<std::uint64_t>(std::floor(bandwidth_mbps * 1e6 * slot_s / 8.0));
}

std::vector<Mat> sweep_corpus(const sim::SimConfig& cfg) {
  const auto sigmas = power_law_spectrum(std::min(cfg.sweep_rows, cfg.sweep_cols), cfg.sweep_decay);
  std::vector<Mat> corpus;
  for (std::size_t c = 0; c < cfg.sweep_corpus; ++c)
    corpus.push_back(make_planted(cfg.sweep_rows, cfg.sweep_cols, sigmas, derive_seed(RngSeed{cfg.seed}, 7, c)));
  return corpus;
}

namespace {

SweepCell run_cell(const sim::SimConfig& cfg, const std::vector<Mat>& corpus, Variant variant,
                   double mbps) {
  CompressorParams params = cfg.compressor_params();
  params.nsc.ecl = false;
  params.nsc.eta = cfg.sweep_eta;
  const auto compressor = make_compressor(variant, params);

  SweepCell cell;
  cell.compressor = variant;
  cell.bandwidth_mbps = mbps;
  cell.budget = budget_for_bandwidth(mbps, cfg.sweep_slot_s);
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    Stream stream("sweep " + std::to_string(c), derive_seed(RngSeed{cfg.seed}, 8, c));
    try {
      const CompressOutcome out = compressor->compress(corpus[c], cell.budget, stream);
      const double err = mse(corpus[c], compressor->decompress(out.bytes));
      cell.mse.push_back(err);
      cell.mean_bytes += static_cast<double>(out.bytes.size());
      cell.mean_rank += static_cast<double>(out.rank_or_k);
    } catch (const BudgetError&) {
      cell.feasible = false;
      cell.mse.clear();
      break;
    }
  }
  if (!cell.feasible) {
    cell.mean_mse = cell.mean_bytes = cell.mean_rank = std::nan("");
    return cell;
  }
  const auto n = static_cast<double>(cell.mse.size());
  for (double e : cell.mse) cell.mean_mse += e;
  cell.mean_mse /= n;
  cell.mean_bytes /= n;
  cell.mean_rank /= n;
  return cell;
}

}  // namespace

std::vector<SweepCell> run_sweep(const sim::SimConfig& cfg, std::span<const double> bandwidths_mbps,
                                 std::span<const Variant> compressors, std::size_t workers) {
  if (bandwidths_mbps.empty() || compressors.empty())
    throw sim::ConfigError("sweep: bandwidth and compressor lists must be non-empty");
  cfg.validate();
  const std::vector<Mat> corpus = sweep_corpus(cfg);
  const std::size_t total = bandwidths_mbps.size() * compressors.size();
  std::vector<SweepCell> cells(total);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(total);
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const Variant v = compressors[i / bandwidths_mbps.size()];
      const double mbps = bandwidths_mbps[i % bandwidths_mbps.size()];
      try {
        cells[i] = run_cell(cfg, corpus, v, mbps);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, total));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return cells;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "compressor,bandwidth_mbps,budget_bytes,mean_mse,mean_payload_bytes,mean_rank\n";
  char buf[256];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%s,%g,%llu,%.9g,%.1f,%.3f\n", std::string(variant_name(c.compressor)).c_str(),
                  c.bandwidth_mbps, static_cast<unsigned long long>(c.budget), c.mean_mse, c.mean_bytes,
                  c.mean_rank);
    os << buf;
  }
}

}  // namespace nsc
