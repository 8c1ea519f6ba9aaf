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

#include "nsc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace nsc::sim {

namespace {

enum SeedTag : std::uint64_t {
  kClientInit = 100,
  kServerInit = 200,
  kTaskSeed = 300,
  kUplinkBase = 1000,
  kDownlinkBase = 2000,
};

Shard sample_shard(const Mat& centers, std::size_t count, std::size_t label_offset, RngSeed seed) {
  const std::size_t classes = centers.rows();
  const std::size_t d_in = centers.cols();
  Shard s{Mat(count, d_in), std::vector<int>(count)};
  for (std::size_t i = 0; i < count; ++i) s.y[i] = static_cast<int>((i + label_offset) % classes);
  std::mt19937_64 gen(seed.value);
  std::shuffle(s.y.begin(), s.y.end(), gen);
  const Mat noise = gaussian(count, d_in, derive_seed(seed, 1));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < d_in; ++j)
      s.x(i, j) = centers(static_cast<std::size_t>(s.y[i]), j) + noise(i, j);
  return s;
}

}  // namespace

double LinkModel::transfer_time(std::uint64_t bytes) const {
  return latency_s + 8.0 * static_cast<double>(bytes) / bandwidth_bps;
}

SyntheticTask make_synthetic_task(RngSeed seed, std::size_t n_clients, std::size_t samples_per_client,
                                  std::size_t d_in, std::size_t classes, double separation,
                                  std::size_t eval_samples) {
  if (classes < 2) throw ConfigError("classes: must be at least 2");
  SyntheticTask task;
  task.centers = gaussian(classes, d_in, derive_seed(seed, 0));
  task.centers *= separation / std::sqrt(static_cast<double>(d_in));
  for (std::size_t c = 0; c < n_clients; ++c)
    task.clients.push_back(
        sample_shard(task.centers, samples_per_client, c * samples_per_client, derive_seed(seed, 1, c)));
  task.eval = sample_shard(task.centers, eval_samples, 0, derive_seed(seed, 2));
  return task;
}

std::uint64_t RoundMetrics::total_uplink() const {
  return std::accumulate(uplink_bytes.begin(), uplink_bytes.end(), std::uint64_t{0});
}

std::uint64_t RoundMetrics::total_downlink() const {
  return std::accumulate(downlink_bytes.begin(), downlink_bytes.end(), std::uint64_t{0});
}

double RoundMetrics::mean_rank() const {
  const std::size_t count = uplink_ranks.size() + downlink_ranks.size();
  if (count == 0) return 0.0;
  const double sum = std::accumulate(uplink_ranks.begin(), uplink_ranks.end(), 0.0) +
                     std::accumulate(downlink_ranks.begin(), downlink_ranks.end(), 0.0);
  return sum / static_cast<double>(count);
}

Shard batch_of(const Shard& shard, std::size_t round, std::size_t batch_size) {
  const std::size_t total = shard.y.size();
  if (batch_size == total) return shard;
  Shard out{Mat(batch_size, shard.x.cols()), std::vector<int>(batch_size)};
  const std::size_t offset = (round * batch_size) % total;
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t src = (offset + i) % total;
    std::copy(shard.x.row(src).begin(), shard.x.row(src).end(), out.x.row(i).begin());
    out.y[i] = shard.y[src];
  }
  return out;
}

RoundMetrics run_round(std::vector<ClientState>& clients, ServerState& server, const RoundContext& ctx) {
  if (ctx.compressor == nullptr) throw SimError("run_round: no compressor");
  if (server.downlink.size() != clients.size())
    throw SimError("run_round: server holds " + std::to_string(server.downlink.size()) +
                   " downlink streams for " + std::to_string(clients.size()) + " clients");

  RoundMetrics m;
  m.round = ctx.round;
  double mse_sum = 0.0;
  double loss_sum = 0.0;

  for (auto& client : clients) {
    const Shard batch = batch_of(client.data, ctx.round, ctx.batch_size);

    // (i) client forward to the cut layer
    const Mat act = client_forward(client.params, batch.x);

    // (ii) compress and ship the activations
    CompressOutcome up;
    try {
      up = ctx.compressor->compress(act, ctx.budget, client.uplink);
    } catch (const Error& e) {
      throw SimError("stream '" + client.uplink.name() + "': " + e.what());
    }
    const Mat act_hat = ctx.compressor->decompress(up.bytes);
    mse_sum += mse(act, act_hat);

    // (iii) server finishes the pass on what it received, steps, and ships the gradient
    ServerPass pass = server_forward_backward(server.params, act_hat, batch.y);
    loss_sum += pass.loss;
    sgd_step(server.params, pass.grads, ctx.learning_rate);

    Stream& down_stream = server.downlink[client.id];
    Mat grad_hat = pass.grad_input;
    std::uint64_t down_bytes = 0;
    std::size_t down_rank = 0;
    if (ctx.compress_downlink) {
      std::uint64_t budget = ctx.budget;
      if (ctx.downlink_reuses_uplink_rank && ctx.compressor->variant() == Variant::kNsc)
        budget = std::min(budget, factor_bytes(act.rows(), act.cols(), up.rank_or_k));
      CompressOutcome down;
      try {
        down = ctx.compressor->compress(pass.grad_input, budget, down_stream);
      } catch (const Error& e) {
        throw SimError("stream '" + down_stream.name() + "': " + e.what());
      }
      grad_hat = ctx.compressor->decompress(down.bytes);
      down_bytes = down.bytes.size();
      down_rank = down.rank_or_k;
    } else {
      down_bytes = wire::kHeaderBytes + 4ULL * grad_hat.size();
    }

    // (iv) client applies the received gradient
    sgd_step(client.params, client_backward(client.params, batch.x, act, grad_hat), ctx.learning_rate);

    m.uplink_bytes.push_back(up.bytes.size());
    m.downlink_bytes.push_back(down_bytes);
    m.uplink_ranks.push_back(up.rank_or_k);
    if (ctx.compress_downlink) m.downlink_ranks.push_back(down_rank);
    m.round_time_s = std::max(m.round_time_s, ctx.link.transfer_time(up.bytes.size()) +
                                                  ctx.link.transfer_time(down_bytes));
  }
  const auto n = static_cast<double>(clients.size());
  m.loss = loss_sum / n;
  m.mean_mse = mse_sum / n;
  return m;
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const RngSeed seed{cfg_.seed};
  task_ = make_synthetic_task(derive_seed(seed, kTaskSeed), cfg_.n_clients, cfg_.samples_per_client,
                              cfg_.d_in, cfg_.classes, cfg_.separation, cfg_.eval_samples);
  compressor_ = make_compressor(cfg_.compressor, cfg_.compressor_params());
  const ModelShape shape{cfg_.d_in, cfg_.hidden, cfg_.hidden2, cfg_.classes};
  const ClientParams front = init_client(shape, derive_seed(seed, kClientInit));
  server_.params = init_server(shape, derive_seed(seed, kServerInit));
  for (std::size_t id = 0; id < cfg_.n_clients; ++id) {
    clients_.push_back(ClientState{id, front, task_.clients[id],
                                   Stream("client " + std::to_string(id) + " uplink",
                                          derive_seed(seed, kUplinkBase + id))});
    server_.downlink.emplace_back("client " + std::to_string(id) + " downlink",
                                  derive_seed(seed, kDownlinkBase + id));
  }
}

RoundMetrics Simulator::step() {
  RoundContext ctx;
  ctx.compressor = compressor_.get();
  ctx.link = LinkModel{cfg_.bandwidth_bps, cfg_.latency_s};
  ctx.budget = cfg_.tensor_budget();
  ctx.learning_rate = cfg_.learning_rate;
  ctx.batch_size = cfg_.batch_size;
  ctx.round = round_;
  ctx.compress_downlink = cfg_.compress_downlink;
  ctx.downlink_reuses_uplink_rank = cfg_.downlink_reuses_uplink_rank;

  RoundMetrics m = run_round(clients_, server_, ctx);
  clock_ += m.round_time_s;
  m.sim_time_s = clock_;
  if (round_ % cfg_.eval_every == 0 || round_ + 1 == cfg_.rounds) last_eval_ = eval_accuracy();
  m.eval_acc = last_eval_;
  ++round_;
  return m;
}

double Simulator::eval_accuracy() const {
  double acc = 0.0;
  for (const auto& c : clients_) acc += accuracy(c.params, server_.params, task_.eval.x, task_.eval.y);
  return acc / static_cast<double>(clients_.size());
}

double Simulator::eval_loss() const {
  double loss = 0.0;
  for (const auto& c : clients_) loss += full_loss(c.params, server_.params, task_.eval.x, task_.eval.y);
  return loss / static_cast<double>(clients_.size());
}

std::vector<RoundMetrics> run_experiment(const SimConfig& cfg) {
  Simulator sim(cfg);
  std::vector<RoundMetrics> rows;
  rows.reserve(cfg.rounds);
  for (std::size_t r = 0; r < cfg.rounds; ++r) rows.push_back(sim.step());
  return rows;
}

void write_csv_header(std::ostream& os) {
  os << "round,loss,eval_acc,uplink_bytes,downlink_bytes,sim_time_s,mean_rank,mean_mse\n";
}

void write_csv_row(std::ostream& os, const RoundMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%.9g,%.6f,%llu,%llu,%.6f,%.4f,%.9g\n", m.round, m.loss, m.eval_acc,
                static_cast<unsigned long long>(m.total_uplink()),
                static_cast<unsigned long long>(m.total_downlink()), m.sim_time_s, m.mean_rank(),
                m.mean_mse);
  os << buf;
}

void write_csv(std::ostream& os, const std::vector<RoundMetrics>& rows) {
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

}  // namespace nsc::sim
