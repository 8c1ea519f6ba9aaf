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

#ifndef NSC_SIM_CONFIG_HPP
#define NSC_SIM_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nsc/baselines.hpp"
#include "nsc/tensor.hpp"

namespace nsc::sim {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Ablation { kFull, kNoEcl, kSingleIteration, kNoWarmStart };

std::string_view ablation_name(Ablation a);
Ablation parse_ablation(std::string_view name);

/// Documented default seed; every experiment is reproducible from it.
inline constexpr std::uint64_t kDefaultSeed = 20260101;

/// Everything one experiment needs. Field names match the config-file keys.
struct SimConfig {
  // topology and schedule
  std::size_t n_clients = 5;
  std::size_t rounds = 100;
  std::size_t batch_size = 64;
  std::size_t samples_per_client = 64;
  std::size_t eval_samples = 500;
  std::size_t eval_every = 1;
  double learning_rate = 0.05;

  // synthetic task and toy model
  std::size_t d_in = 32;
  std::size_t hidden = 32;
  std::size_t hidden2 = 32;
  std::size_t classes = 10;
  double separation = 4.0;

  // link
  double bandwidth_bps = 100e6;
  double latency_s = 0.05;
  double slot_s = 1e-4;
  std::uint64_t b_max_bytes = 0;  // 0: derive from bandwidth_bps * slot_s / 8

  // compressor
  Variant compressor = Variant::kNsc;
  double eta = 0.9;
  std::size_t r_cap = 32;
  double beta = 0.9;
  std::size_t oasa_max_iters = 10;
  std::size_t oasa_min_iters = 2;
  std::size_t oasa_patience = 2;
  double oasa_stall_tol = 1e-3;
  ResidualTarget residual_target = ResidualTarget::kOriginal;
  std::size_t spectral_oversampling = 8;
  std::size_t spectral_power_iters = 2;
  bool warm_start = false;
  bool compress_downlink = true;
  bool downlink_reuses_uplink_rank = false;
  double random_frac = 0.1;
  std::uint32_t quant_bits = 8;
  std::size_t fixed_rank = 4;
  std::size_t fixed_iters = 1;

  // ablation switches
  bool no_ecl = false;
  bool single_iteration = false;

  // sweep corpus
  std::size_t sweep_rows = 128;
  std::size_t sweep_cols = 96;
  std::size_t sweep_corpus = 4;
  double sweep_decay = 2.0;
  double sweep_eta = 0.9999;
  double sweep_slot_s = 1e-3;

  std::uint64_t seed = kDefaultSeed;
  std::string output = "nsc_run.csv";

  void validate() const;
  /// Per-tensor payload budget in bytes.
  std::uint64_t tensor_budget() const;
  /// Compressor parameters with the ablation switches applied.
  CompressorParams compressor_params() const;
  void apply_ablation(Ablation a);
};

struct ConfigKey {
  std::string_view key;
  std::string_view help;
};

/// Every recognized config key with a one-line description.
const std::vector<ConfigKey>& config_keys();

/// Sets one key from its textual value. Throws ConfigError naming the key.
void set_config_value(SimConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; '#' starts a comment; blank lines are ignored.
/// Errors carry "<origin>:<line>: <key>: <reason>".
SimConfig parse_config(std::string_view text, std::string_view origin = "config");
SimConfig load_config(const std::string& path);

}  // namespace nsc::sim

#endif  // NSC_SIM_CONFIG_HPP
