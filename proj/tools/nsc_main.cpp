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

// nsc: experiment runner, bandwidth sweeps, ablations and wire-format goldens.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nsc/baselines.hpp"
#include "nsc/goldens.hpp"
#include "nsc/log.hpp"
#include "nsc/oasa.hpp"
#include "nsc/sim_config.hpp"
#include "nsc/simulator.hpp"
#include "nsc/spectral.hpp"
#include "nsc/sweep.hpp"
#include "nsc/wire.hpp"

namespace {

using nsc::sim::ConfigError;
using nsc::sim::SimConfig;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

// Options shared by run, sweep and ablate.
struct CommonOptions {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t rounds = 0;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "config file of `key = value` lines")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output CSV path (written atomically)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "master seed");
  cmd->add_option("--rounds", o.rounds, "training rounds per run")->check(CLI::PositiveNumber);
  cmd->add_option("--set", o.sets, "override one config key, as key=value (repeatable)");
}

SimConfig build_config(const CommonOptions& o) {
  SimConfig cfg = o.config.empty() ? SimConfig{} : nsc::sim::load_config(o.config);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set " + kv + ": expected key=value");
    nsc::sim::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed_set) cfg.seed = o.seed;
  if (o.rounds > 0) cfg.rounds = o.rounds;
  return cfg;
}

nsc::Variant variant_arg(const std::string& name) {
  try {
    return nsc::parse_variant(name);
  } catch (const nsc::Error& e) {
    throw ConfigError(std::string("--compressor: ") + e.what());
  }
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw nsc::Error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string key_reference() {
  std::ostringstream os;
  os << "\nConfig keys (config file `key = value`, or --set key=value):\n";
  for (const auto& k : nsc::sim::config_keys()) {
    os << "  " << k.key;
    for (std::size_t pad = k.key.size(); pad < 30; ++pad) os << ' ';
    os << k.help << '\n';
  }
  os << "\nEnvironment: NSC_LOG=error|warn|info|debug sets log verbosity (default warn).\n";
  return os.str();
}

// ---- run ------------------------------------------------------------------------

int cmd_run(const CommonOptions& o, double mbps, const std::string& compressor, const std::string& ablation) {
  SimConfig cfg = build_config(o);
  if (mbps > 0) cfg.bandwidth_bps = mbps * 1e6;
  if (!compressor.empty()) cfg.compressor = variant_arg(compressor);
  if (!ablation.empty()) cfg.apply_ablation(nsc::sim::parse_ablation(ablation));
  if (!o.out.empty()) cfg.output = o.out;
  cfg.validate();

  nsc::log(nsc::LogLevel::kInfo, "run: " + std::to_string(cfg.rounds) + " rounds, compressor " +
                                     std::string(nsc::variant_name(cfg.compressor)) + ", budget " +
                                     std::to_string(cfg.tensor_budget()) + " bytes");
  nsc::sim::Simulator sim(cfg);
  std::ostringstream csv;
  nsc::sim::write_csv_header(csv);
  nsc::sim::RoundMetrics last;
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    last = sim.step();
    nsc::sim::write_csv_row(csv, last);
    if (nsc::log_level() >= nsc::LogLevel::kDebug)
      nsc::log(nsc::LogLevel::kDebug, "round " + std::to_string(r) + " loss " + std::to_string(last.loss));
  }
  nsc::sim::write_file_atomically(cfg.output, csv.str());
  std::printf("rounds=%zu final_loss=%.6f eval_acc=%.4f sim_time_s=%.4f -> %s\n", cfg.rounds, last.loss,
              last.eval_acc, last.sim_time_s, cfg.output.c_str());
  return 0;
}

// ---- sweep ----------------------------------------------------------------------

int cmd_sweep(const CommonOptions& o, std::vector<double> mbps, std::vector<std::string> names,
              std::size_t workers) {
  SimConfig cfg = build_config(o);
  if (mbps.empty()) mbps = {25, 50, 100, 200};
  if (names.empty()) names = {"nsc", "randtopk", "quant", "fixedrank"};
  std::vector<nsc::Variant> variants;
  for (const auto& n : names) variants.push_back(variant_arg(n));
  for (double b : mbps)
    if (!(b > 0)) throw ConfigError("--bandwidth-mbps: values must be positive");
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());

  const auto cells = nsc::run_sweep(cfg, mbps, variants, workers);
  std::ostringstream csv;
  nsc::write_sweep_csv(csv, cells);
  const std::string out = o.out.empty() ? "nsc_sweep.csv" : o.out;
  nsc::sim::write_file_atomically(out, csv.str());

  // Table view: compressors down, bandwidths across.
  std::printf("%-10s", "MSE");
  for (double b : mbps) std::printf(" %10g Mbps", b);
  std::printf("\n");
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::printf("%-10s", std::string(nsc::variant_name(variants[v])).c_str());
    for (std::size_t b = 0; b < mbps.size(); ++b) {
      const auto& c = cells[v * mbps.size() + b];
      if (c.feasible)
        std::printf(" %15.4e", c.mean_mse);
      else
        std::printf(" %15s", "infeasible");
    }
    std::printf("\n");
  }
  std::printf("-> %s\n", out.c_str());
  return 0;
}

// ---- ablate ---------------------------------------------------------------------

int cmd_ablate(const CommonOptions& o, std::vector<std::string> modes, std::size_t seeds, std::size_t workers) {
  const SimConfig base = build_config(o);
  if (modes.empty()) modes = {"full", "no_ecl", "single_iteration"};
  std::vector<nsc::sim::Ablation> ablations;
  for (const auto& m : modes) ablations.push_back(nsc::sim::parse_ablation(m));
  if (seeds == 0) throw ConfigError("--seeds: must be positive");
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());

  struct Row {
    double loss = 0, acc = 0, mse = 0, rank = 0;
    std::uint64_t bytes = 0;
  };
  const std::size_t total = ablations.size() * seeds;
  std::vector<Row> rows(total);
  std::vector<std::exception_ptr> failures(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        SimConfig cfg = base;
        cfg.seed = base.seed + i % seeds;
        cfg.apply_ablation(ablations[i / seeds]);
        const auto metrics = nsc::sim::run_experiment(cfg);
        Row r;
        r.loss = metrics.back().loss;
        r.acc = metrics.back().eval_acc;
        for (const auto& m : metrics) {
          r.mse += m.mean_mse / static_cast<double>(metrics.size());
          r.rank += m.mean_rank() / static_cast<double>(metrics.size());
          r.bytes += m.total_uplink() + m.total_downlink();
        }
        rows[i] = r;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(workers, total); ++t) pool.emplace_back(work);
    work();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::ostringstream csv;
  csv << "ablation,seed,final_loss,final_eval_acc,mean_mse,mean_rank,total_bytes\n";
  char buf[256];
  for (std::size_t i = 0; i < total; ++i) {
    std::snprintf(buf, sizeof buf, "%s,%llu,%.9g,%.6f,%.9g,%.4f,%llu\n",
                  std::string(nsc::sim::ablation_name(ablations[i / seeds])).c_str(),
                  static_cast<unsigned long long>(base.seed + i % seeds), rows[i].loss, rows[i].acc, rows[i].mse,
                  rows[i].rank, static_cast<unsigned long long>(rows[i].bytes));
    csv << buf;
  }
  const std::string out = o.out.empty() ? "nsc_ablate.csv" : o.out;
  nsc::sim::write_file_atomically(out, csv.str());

  std::printf("%-18s %10s %10s %12s\n", "ablation", "mean_acc", "mean_loss", "mean_mse");
  for (std::size_t a = 0; a < ablations.size(); ++a) {
    double acc = 0, loss = 0, mse = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      acc += rows[a * seeds + s].acc / static_cast<double>(seeds);
      loss += rows[a * seeds + s].loss / static_cast<double>(seeds);
      mse += rows[a * seeds + s].mse / static_cast<double>(seeds);
    }
    std::printf("%-18s %10.4f %10.4f %12.4e\n", std::string(nsc::sim::ablation_name(ablations[a])).c_str(), acc,
                loss, mse);
  }
  std::printf("-> %s\n", out.c_str());
  return 0;
}

// ---- goldens --------------------------------------------------------------------

int cmd_goldens_emit(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& g : nsc::wire::golden_vectors()) {
    const auto bytes = nsc::wire::encode(g.payload);
    const auto path = (std::filesystem::path(dir) / g.file).string();
    nsc::sim::write_file_atomically(path, std::string(bytes.begin(), bytes.end()));
    std::printf("wrote %s (%zu bytes)\n", path.c_str(), bytes.size());
  }
  return 0;
}

int cmd_goldens_verify(const std::string& dir) {
  int bad = 0;
  for (const auto& g : nsc::wire::golden_vectors()) {
    const auto path = std::filesystem::path(dir) / g.file;
    std::string verdict = "ok";
    try {
      const auto file = read_bytes(path);
      if (nsc::wire::encode(g.payload) != file)
        verdict = "encoder output differs from file";
      else if (nsc::wire::encode(nsc::wire::decode(file)) != file)
        verdict = "decode/encode does not reproduce file";
    } catch (const std::exception& e) {
      verdict = e.what();
    }
    if (verdict != "ok") ++bad;
    std::printf("%-24s %s\n", g.file.c_str(), verdict.c_str());
  }
  if (bad > 0) {
    std::fprintf(stderr, "nsc: %d golden vector(s) failed\n", bad);
    return kRuntimeError;
  }
  return 0;
}

// ---- oracle ---------------------------------------------------------------------

int cmd_oracle(const CommonOptions& o, std::size_t rows, std::size_t cols, std::size_t rank, double decay,
               std::size_t trials) {
  const SimConfig cfg = build_config(o);
  if (rank == 0 || rank > std::min(rows, cols)) throw ConfigError("--rank: must lie in [1, min(rows, cols)]");
  if (trials == 0) throw ConfigError("--trials: must be positive");
  std::ostringstream csv;
  csv << "trial,rank,oasa_residual,optimal_residual,ratio,iters,max_sigma_rel_err\n";
  const auto sigmas = nsc::power_law_spectrum(std::min(rows, cols), decay);
  double worst = 0.0;
  char buf[256];
  for (std::size_t t = 0; t < trials; ++t) {
    const nsc::RngSeed seed = nsc::derive_seed(nsc::RngSeed{cfg.seed}, 11, t);
    const nsc::Mat m = nsc::make_planted(rows, cols, sigmas, seed);
    const nsc::SvdResult exact = nsc::exact_svd(m);
    double tail = 0.0, total = 0.0;
    for (std::size_t i = 0; i < exact.sigma.size(); ++i) {
      total += exact.sigma[i] * exact.sigma[i];
      if (i >= rank) tail += exact.sigma[i] * exact.sigma[i];
    }
    const double optimal = std::sqrt(tail / total);

    nsc::OasaConfig oc;
    oc.max_iters = cfg.oasa_max_iters;
    oc.min_iters = cfg.oasa_min_iters;
    oc.patience = cfg.oasa_patience;
    oc.stall_tol = cfg.oasa_stall_tol;
    oc.seed = nsc::derive_seed(seed, 1);
    nsc::ErrorState unused(rows, cols);
    const nsc::OasaResult res = nsc::compress(m, rank, oc, unused, false);

    nsc::SpectralConfig sc;
    sc.probe_rank = rank;
    sc.oversampling = std::min(cfg.spectral_oversampling, std::min(rows, cols) - rank);
    sc.power_iters = cfg.spectral_power_iters;
    sc.seed = nsc::derive_seed(seed, 2);
    const auto est = nsc::estimate_spectrum(m, sc);
    double sigma_err = 0.0;
    for (std::size_t i = 0; i < rank; ++i)
      sigma_err = std::max(sigma_err, std::abs(est.sigmas[i] - exact.sigma[i]) / exact.sigma[i]);

    const double ratio = optimal > 0 ? res.final_residual / optimal : 1.0;
    worst = std::max(worst, ratio);
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g,%.6f,%zu,%.3e\n", t, rank, res.final_residual, optimal, ratio,
                  res.iters_used, sigma_err);
    csv << buf;
  }
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    nsc::sim::write_file_atomically(o.out, csv.str());
  }
  std::fprintf(stderr, "worst residual / optimal = %.6f over %zu trials\n", worst, trials);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandwidth-aware low-rank compression for split learning: simulator and benchmarks"};
  app.require_subcommand(1);
  app.footer(key_reference());

  CommonOptions common;
  double run_mbps = 0.0;
  std::string run_compressor, run_ablation;
  auto* run = app.add_subcommand("run", "run one split-learning experiment and write per-round CSV");
  add_common(run, common);
  run->add_option("--bandwidth-mbps", run_mbps, "link bandwidth in Mbps (1 Mbps = 1e6 bit/s)")
      ->check(CLI::PositiveNumber);
  run->add_option("--compressor", run_compressor, "nsc, randtopk, quant or fixedrank");
  run->add_option("--ablation", run_ablation, "full, no_ecl, single_iteration or no_warm_start");

  std::vector<double> sweep_mbps;
  std::vector<std::string> sweep_compressors;
  std::size_t workers = 0;
  auto* sweep = app.add_subcommand("sweep", "bandwidth x compressor reconstruction-MSE grid on planted spectra");
  add_common(sweep, common);
  sweep->add_option("--bandwidth-mbps", sweep_mbps, "bandwidths in Mbps (default 25,50,100,200)")->delimiter(',');
  sweep->add_option("--compressor", sweep_compressors, "compressors (default all four)")->delimiter(',');
  sweep->add_option("--workers", workers, "worker threads (default: hardware concurrency)");

  std::vector<std::string> ablate_modes;
  std::size_t ablate_seeds = 10;
  auto* ablate = app.add_subcommand("ablate", "paired-seed ablation runs (full vs no_ecl vs single_iteration)");
  add_common(ablate, common);
  ablate->add_option("--ablation", ablate_modes, "modes to run (default full,no_ecl,single_iteration)")
      ->delimiter(',');
  ablate->add_option("--seeds", ablate_seeds, "paired seeds per mode, starting at --seed");
  ablate->add_option("--workers", workers, "worker threads (default: hardware concurrency)");

  std::string golden_dir = "tests/golden";
  auto* goldens = app.add_subcommand("goldens", "emit or verify the wire-format golden vectors");
  goldens->require_subcommand(1);
  auto* emit = goldens->add_subcommand("emit", "write the golden vectors");
  emit->add_option("--dir", golden_dir, "directory (default tests/golden)");
  auto* verify = goldens->add_subcommand("verify", "check files against the encoder and decoder");
  verify->add_option("--dir", golden_dir, "directory (default tests/golden)");

  std::size_t o_rows = 128, o_cols = 96, o_rank = 8, o_trials = 10;
  double o_decay = 1.0;
  auto* oracle = app.add_subcommand("oracle", "compare the iterative compressor and spectrum estimate with exact SVD");
  add_common(oracle, common);
  oracle->add_option("--rows", o_rows, "matrix rows")->check(CLI::PositiveNumber);
  oracle->add_option("--cols", o_cols, "matrix columns")->check(CLI::PositiveNumber);
  oracle->add_option("--rank", o_rank, "target rank");
  oracle->add_option("--decay", o_decay, "power-law decay of the planted spectrum");
  oracle->add_option("--trials", o_trials, "number of random matrices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) return cmd_run(common, run_mbps, run_compressor, run_ablation);
    if (*sweep) return cmd_sweep(common, sweep_mbps, sweep_compressors, workers);
    if (*ablate) return cmd_ablate(common, ablate_modes, ablate_seeds, workers);
    if (*emit) return cmd_goldens_emit(golden_dir);
    if (*verify) return cmd_goldens_verify(golden_dir);
    if (*oracle) return cmd_oracle(common, o_rows, o_cols, o_rank, o_decay, o_trials);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "nsc: config error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nsc: error: %s\n", e.what());
    return kRuntimeError;
  }
  return kUsageError;
}
