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

#ifndef NSC_SIMULATOR_HPP
#define NSC_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "nsc/baselines.hpp"
#include "nsc/sim_config.hpp"
#include "nsc/toy_model.hpp"

namespace nsc::sim {

/// A round could not complete; the message names the failing stream.
class SimError : public Error {
 public:
  using Error::Error;
};

struct LinkModel {
  double bandwidth_bps = 100e6;
  double latency_s = 0.05;

  /// latency + 8 * bytes / bandwidth.
  double transfer_time(std::uint64_t bytes) const;
};

struct Shard {
  Mat x;
  std::vector<int> y;
};

struct SyntheticTask {
  std::vector<Shard> clients;
  Shard eval;
  Mat centers;  // classes x d_in
};

/// Gaussian class clusters (unit noise around centers of norm ~separation),
/// split IID: every shard gets the same per-class counts up to one sample.
SyntheticTask make_synthetic_task(RngSeed seed, std::size_t n_clients, std::size_t samples_per_client,
                                  std::size_t d_in, std::size_t classes, double separation = 4.0,
                                  std::size_t eval_samples = 500);

struct ClientState {
  std::size_t id = 0;
  ClientParams params;
  Shard data;
  Stream uplink;
};

struct ServerState {
  ServerParams params;
  std::vector<Stream> downlink;  // one per client id
};

struct RoundMetrics {
  std::size_t round = 0;
  double loss = 0.0;  // mean server-side batch loss over clients
  double eval_acc = 0.0;
  std::vector<std::uint64_t> uplink_bytes;    // per client
  std::vector<std::uint64_t> downlink_bytes;  // per client
  double round_time_s = 0.0;
  double sim_time_s = 0.0;  // cumulative
  double mean_mse = 0.0;    // mean uplink activation reconstruction MSE
  std::vector<std::size_t> uplink_ranks;
  std::vector<std::size_t> downlink_ranks;

  std::uint64_t total_uplink() const;
  std::uint64_t total_downlink() const;
  double mean_rank() const;
};

/// Everything a round needs besides the mutable endpoint states.
struct RoundContext {
  const Compressor* compressor = nullptr;
  LinkModel link;
  std::uint64_t budget = 0;
  double learning_rate = 0.0;
  std::size_t batch_size = 0;
  std::size_t round = 0;
  bool compress_downlink = true;
  bool downlink_reuses_uplink_rank = false;
};

/// Rows [offset, offset + batch) of the shard, wrapping around.
Shard batch_of(const Shard& shard, std::size_t round, std::size_t batch_size);

/// One training round: each client in id order runs forward, ships compressed
/// activations, the server finishes forward/backward and steps, ships the
/// compressed cut-layer gradient back, and the client steps. Wall-clock per
/// round is the slowest client's uplink + downlink transfer time.
RoundMetrics run_round(std::vector<ClientState>& clients, ServerState& server, const RoundContext& ctx);

class Simulator {
 public:
  explicit Simulator(SimConfig cfg);

  RoundMetrics step();
  double eval_accuracy() const;
  double eval_loss() const;

  const SimConfig& config() const noexcept { return cfg_; }
  const SyntheticTask& task() const noexcept { return task_; }
  const std::vector<ClientState>& clients() const noexcept { return clients_; }
  std::vector<ClientState>& clients() noexcept { return clients_; }
  const ServerState& server() const noexcept { return server_; }

 private:
  SimConfig cfg_;
  SyntheticTask task_;
  std::unique_ptr<Compressor> compressor_;
  std::vector<ClientState> clients_;
  ServerState server_;
  std::size_t round_ = 0;
  double clock_ = 0.0;
  double last_eval_ = 0.0;
};

/// Runs cfg.rounds rounds. Deterministic for a fixed config.
std::vector<RoundMetrics> run_experiment(const SimConfig& cfg);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const RoundMetrics& m);
void write_csv(std::ostream& os, const std::vector<RoundMetrics>& rows);

/// Writes to a sibling temp file then renames over `path`.
void write_file_atomically(const std::string& path, const std::string& contents);

}  // namespace nsc::sim

#endif  // NSC_SIMULATOR_HPP
