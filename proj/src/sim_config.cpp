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

#include "nsc/sim_config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace nsc::sim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view why) {
  throw ConfigError(std::string(key) + ": " + std::string(why));
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    bad(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

std::size_t to_size(std::string_view key, std::string_view v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(out))
    bad(key, "expected a finite real number, got '" + s + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, "expected true or false, got '" + std::string(v) + "'");
}

using Setter = std::function<void(SimConfig&, std::string_view, std::string_view)>;

struct KeyEntry {
  ConfigKey doc;
  Setter set;
};

#define NSC_SIZE(field) [](SimConfig& c, std::string_view k, std::string_view v) { c.field = to_size(k, v); }
#define NSC_REAL(field) [](SimConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v); }
#define NSC_BOOL(field) [](SimConfig& c, std::string_view k, std::string_view v) { c.field = to_bool(k, v); }

const std::vector<KeyEntry>& registry() {
  static const std::vector<KeyEntry> keys = {
      {{"n_clients", "number of clients (default 5)"}, NSC_SIZE(n_clients)},
      {{"rounds", "training rounds (default 100)"}, NSC_SIZE(rounds)},
      {{"batch_size", "mini-batch rows per client per round (default 64)"}, NSC_SIZE(batch_size)},
      {{"samples_per_client", "training samples in each client shard (default 64)"}, NSC_SIZE(samples_per_client)},
      {{"eval_samples", "held-out evaluation samples (default 500)"}, NSC_SIZE(eval_samples)},
      {{"eval_every", "evaluate every N rounds, carrying the last value between (default 1)"}, NSC_SIZE(eval_every)},
      {{"learning_rate", "SGD step size for client and server (default 0.05)"}, NSC_REAL(learning_rate)},
      {{"d_in", "input features (default 32)"}, NSC_SIZE(d_in)},
      {{"hidden", "cut-layer width, i.e. columns of the activation matrix (default 32)"}, NSC_SIZE(hidden)},
      {{"hidden2", "server hidden width (default 32)"}, NSC_SIZE(hidden2)},
      {{"classes", "number of classes, at least 2 (default 10)"}, NSC_SIZE(classes)},
      {{"separation", "norm scale of the class centers (default 4.0)"}, NSC_REAL(separation)},
      {{"bandwidth_bps", "link bandwidth in bits per second (default 1e8)"}, NSC_REAL(bandwidth_bps)},
      {{"latency_s", "one-way link latency in seconds (default 0.05)"}, NSC_REAL(latency_s)},
      {{"slot_s", "transmission slot per tensor; budget = bandwidth_bps * slot_s / 8 (default 1e-4)"}, NSC_REAL(slot_s)},
      {{"b_max_bytes", "explicit per-tensor budget in bytes, overrides slot_s when > 0 (default 0)"},
       [](SimConfig& c, std::string_view k, std::string_view v) { c.b_max_bytes = to_u64(k, v); }},
      {{"compressor", "nsc | randtopk | quant | fixedrank (default nsc)"},
       [](SimConfig& c, std::string_view k, std::string_view v) {
         try {
           c.compressor = parse_variant(v);
         } catch (const Error& e) {
           bad(k, e.what());
         }
       }},
      {{"eta", "energy-coverage threshold in (0, 1) (default 0.9)"}, NSC_REAL(eta)},
      {{"r_cap", "rank cap (default 32)"}, NSC_SIZE(r_cap)},
      {{"beta", "error-feedback momentum in [0, 1] (default 0.9)"}, NSC_REAL(beta)},
      {{"oasa_max_iters", "alternating iterations per call (default 10)"}, NSC_SIZE(oasa_max_iters)},
      {{"oasa_min_iters", "iterations before early stopping may trigger (default 2)"}, NSC_SIZE(oasa_min_iters)},
      {{"oasa_patience", "stagnant iterations tolerated (default 2)"}, NSC_SIZE(oasa_patience)},
      {{"oasa_stall_tol", "relative residual improvement counted as progress (default 1e-3)"}, NSC_REAL(oasa_stall_tol)},
      {{"residual_target", "original (E += M - M_hat) | compensated (E += M + E - M_hat) (default original)"},
       [](SimConfig& c, std::string_view k, std::string_view v) {
         if (v == "original") c.residual_target = ResidualTarget::kOriginal;
         else if (v == "compensated") c.residual_target = ResidualTarget::kCompensated;
         else bad(k, "expected original or compensated");
       }},
      {{"spectral_oversampling", "extra probe columns of the spectral sketch (default 8)"}, NSC_SIZE(spectral_oversampling)},
      {{"spectral_power_iters", "power rounds of the spectral sketch, at most 8 (default 2)"}, NSC_SIZE(spectral_power_iters)},
      {{"warm_start", "start each call from the stream's previous right basis (default false)"}, NSC_BOOL(warm_start)},
      {{"compress_downlink", "also compress server-to-client gradients (default true)"}, NSC_BOOL(compress_downlink)},
      {{"downlink_reuses_uplink_rank", "cap the gradient rank at the activation rank instead of a fresh selection (default false)"},
       NSC_BOOL(downlink_reuses_uplink_rank)},
      {{"random_frac", "randtopk share of randomly kept entries (default 0.1)"}, NSC_REAL(random_frac)},
      {{"quant_bits", "widest quantizer bit width, 2..8 (default 8)"},
       [](SimConfig& c, std::string_view k, std::string_view v) { c.quant_bits = static_cast<std::uint32_t>(to_u64(k, v)); }},
      {{"fixed_rank", "fixedrank baseline rank (default 4)"}, NSC_SIZE(fixed_rank)},
      {{"fixed_iters", "fixedrank baseline iterations (default 1)"}, NSC_SIZE(fixed_iters)},
      {{"no_ecl", "disable error feedback (default false)"}, NSC_BOOL(no_ecl)},
      {{"single_iteration", "run one alternating iteration per call (default false)"}, NSC_BOOL(single_iteration)},
      {{"sweep_rows", "rows of each sweep corpus matrix (default 128)"}, NSC_SIZE(sweep_rows)},
      {{"sweep_cols", "columns of each sweep corpus matrix (default 96)"}, NSC_SIZE(sweep_cols)},
      {{"sweep_corpus", "matrices per sweep cell (default 4)"}, NSC_SIZE(sweep_corpus)},
      {{"sweep_decay", "power-law exponent of the sweep spectra, sigma_i = i^-decay (default 2)"}, NSC_REAL(sweep_decay)},
      {{"sweep_eta", "energy threshold used by nsc in sweeps (default 0.9999)"}, NSC_REAL(sweep_eta)},
      {{"sweep_slot_s", "slot converting sweep bandwidths to byte budgets (default 1e-3)"}, NSC_REAL(sweep_slot_s)},
      {{"seed", "master seed (default 20260101)"},
       [](SimConfig& c, std::string_view k, std::string_view v) { c.seed = to_u64(k, v); }},
      {{"output", "CSV output path (default nsc_run.csv)"},
       [](SimConfig& c, std::string_view, std::string_view v) { c.output = std::string(v); }},
  };
  return keys;
}

#undef NSC_SIZE
#undef NSC_REAL
#undef NSC_BOOL

}  // namespace

std::string_view ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kNoEcl: return "no_ecl";
    case Ablation::kSingleIteration: return "single_iteration";
    case Ablation::kNoWarmStart: return "no_warm_start";
  }
  return "?";
}

Ablation parse_ablation(std::string_view name) {
  for (Ablation a : {Ablation::kFull, Ablation::kNoEcl, Ablation::kSingleIteration, Ablation::kNoWarmStart})
    if (ablation_name(a) == name) return a;
  throw ConfigError("ablation: unknown mode '" + std::string(name) +
                    "' (expected full, no_ecl, single_iteration or no_warm_start)");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> docs = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : registry()) out.push_back(e.doc);
    return out;
  }();
  return docs;
}

void set_config_value(SimConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& e : registry()) {
    if (e.doc.key == key) {
      e.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError(std::string(key) + ": unknown key");
}

void SimConfig::validate() const {
  auto require = [](bool ok, std::string_view key, std::string_view why) {
    if (!ok) bad(key, why);
  };
  require(n_clients >= 1, "n_clients", "must be at least 1");
  require(rounds >= 1, "rounds", "must be at least 1");
  require(batch_size >= 1, "batch_size", "must be at least 1");
  require(samples_per_client >= batch_size, "samples_per_client", "must be at least batch_size");
  require(eval_samples >= 1, "eval_samples", "must be at least 1");
  require(eval_every >= 1, "eval_every", "must be at least 1");
  require(learning_rate >= 0.0, "learning_rate", "must be non-negative");
  require(d_in >= 1 && hidden >= 1 && hidden2 >= 1, "hidden", "layer widths must be positive");
  require(classes >= 2, "classes", "must be at least 2");
  require(separation >= 0.0, "separation", "must be non-negative");
  require(bandwidth_bps > 0.0, "bandwidth_bps", "must be positive");
  require(latency_s >= 0.0, "latency_s", "must be non-negative");
  require(slot_s > 0.0, "slot_s", "must be positive");
  require(eta > 0.0 && eta < 1.0, "eta", "must lie in (0, 1)");
  require(r_cap >= 1, "r_cap", "must be at least 1");
  require(beta >= 0.0 && beta <= 1.0, "beta", "must lie in [0, 1]");
  require(oasa_max_iters >= 1, "oasa_max_iters", "must be at least 1");
  require(oasa_min_iters <= oasa_max_iters, "oasa_min_iters", "must not exceed oasa_max_iters");
  require(oasa_patience >= 1, "oasa_patience", "must be at least 1");
  require(oasa_stall_tol > 0.0, "oasa_stall_tol", "must be positive");
  require(spectral_power_iters <= SpectralConfig::kMaxPowerIters, "spectral_power_iters", "must be at most 8");
  require(random_frac >= 0.0 && random_frac <= 1.0, "random_frac", "must lie in [0, 1]");
  require(quant_bits >= 2 && quant_bits <= 8, "quant_bits", "must lie in [2, 8]");
  require(fixed_rank >= 1, "fixed_rank", "must be at least 1");
  require(fixed_iters >= 1, "fixed_iters", "must be at least 1");
  require(sweep_rows >= 1 && sweep_cols >= 1, "sweep_rows", "sweep matrix dimensions must be positive");
  require(sweep_corpus >= 1, "sweep_corpus", "must be at least 1");
  require(sweep_eta > 0.0 && sweep_eta < 1.0, "sweep_eta", "must lie in (0, 1)");
  require(sweep_slot_s > 0.0, "sweep_slot_s", "must be positive");
  require(!output.empty(), "output", "must not be empty");
}

std::uint64_t SimConfig::tensor_budget() const {
  if (b_max_bytes > 0) return b_max_bytes;
  return static_cast<std::uint64_t>(std::floor(bandwidth_bps * slot_s / 8.0));
}

CompressorParams SimConfig::compressor_params() const {
  CompressorParams p;
  p.nsc.eta = eta;
  p.nsc.r_cap = r_cap;
  p.nsc.spectral.oversampling = spectral_oversampling;
  p.nsc.spectral.power_iters = spectral_power_iters;
  p.nsc.oasa.max_iters = single_iteration ? 1 : oasa_max_iters;
  p.nsc.oasa.min_iters = single_iteration ? std::min<std::size_t>(oasa_min_iters, 1) : oasa_min_iters;
  p.nsc.oasa.patience = oasa_patience;
  p.nsc.oasa.stall_tol = oasa_stall_tol;
  p.nsc.oasa.beta = beta;
  p.nsc.oasa.residual_target = residual_target;
  p.nsc.ecl = !no_ecl;
  p.nsc.warm_start = warm_start;
  p.random_frac = random_frac;
  p.quant_bits = quant_bits;
  p.fixed_rank = fixed_rank;
  p.fixed_iters = fixed_iters;
  return p;
}

void SimConfig::apply_ablation(Ablation a) {
  switch (a) {
    case Ablation::kFull: break;
    case Ablation::kNoEcl: no_ecl = true; break;
    case Ablation::kSingleIteration: single_iteration = true; break;
    case Ablation::kNoWarmStart: warm_start = false; break;
  }
}

SimConfig parse_config(std::string_view text, std::string_view origin) {
  SimConfig cfg;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace nsc::sim
