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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"

namespace nsc::sim {
namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.n_clients = 3;
  cfg.rounds = 12;
  cfg.batch_size = 16;
  cfg.samples_per_client = 32;
  cfg.eval_samples = 120;
  cfg.d_in = 12;
  cfg.hidden = 10;
  cfg.hidden2 = 8;
  cfg.classes = 4;
  cfg.b_max_bytes = 4 * 3 * (16 + 10);
  return cfg;
}

std::string csv_of(const SimConfig& cfg) {
  std::ostringstream os;
  write_csv(os, run_experiment(cfg));
  return os.str();
}

TEST(Link, TransferTime) {
  const LinkModel link{100e6, 0.05};
  EXPECT_DOUBLE_EQ(link.transfer_time(6164), 0.05 + 6164 * 8 / 100e6);
  EXPECT_DOUBLE_EQ(link.transfer_time(0), 0.05);
}

TEST(SyntheticTask, DeterministicAndBalanced) {
  const auto a = make_synthetic_task(RngSeed{1}, 4, 50, 6, 5, 4.0, 100);
  const auto b = make_synthetic_task(RngSeed{1}, 4, 50, 6, 5, 4.0, 100);
  ASSERT_EQ(a.clients.size(), 4U);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(a.clients[c].x, b.clients[c].x);
    EXPECT_EQ(a.clients[c].y, b.clients[c].y);
    std::vector<int> hist(5, 0);
    for (int y : a.clients[c].y) ++hist[static_cast<std::size_t>(y)];
    for (int h : hist) EXPECT_EQ(h, 10);
  }
  // Default task: every shard within 10% of the global class frequency.
  const auto d = make_synthetic_task(RngSeed{9}, 5, 64, 32, 10);
  for (const auto& shard : d.clients) {
    std::vector<int> hist(10, 0);
    for (int y : shard.y) ++hist[static_cast<std::size_t>(y)];
    for (int h : hist) EXPECT_LT(std::abs(h - 6.4) / 6.4, 0.1);
  }
  EXPECT_EQ(a.eval.x.rows(), 100U);
  EXPECT_NE(a.clients[0].x, a.clients[1].x);
  const auto c = make_synthetic_task(RngSeed{2}, 4, 50, 6, 5, 4.0, 100);
  EXPECT_NE(a.clients[0].x, c.clients[0].x);
}

TEST(SyntheticTask, HistogramsDifferByAtMostOne) {
  const auto t = make_synthetic_task(RngSeed{3}, 3, 23, 4, 10, 4.0, 10);
  for (const auto& shard : t.clients) {
    std::vector<int> hist(10, 0);
    for (int y : shard.y) ++hist[static_cast<std::size_t>(y)];
    EXPECT_LE(*std::max_element(hist.begin(), hist.end()) - *std::min_element(hist.begin(), hist.end()), 1);
  }
}

TEST(Batches, WrapAround) {
  Shard s{Mat{{0}, {1}, {2}, {3}, {4}}, {0, 1, 2, 3, 4}};
  const Shard b = batch_of(s, 1, 3);
  EXPECT_EQ(b.y, (std::vector<int>{3, 4, 0}));
  EXPECT_EQ(b.x, (Mat{{3}, {4}, {0}}));
}

TEST(Simulator, LosslessPathMatchesUnsplitTrainer) {
  SimConfig cfg = oracle::lossless_config(small_config());
  cfg.rounds = 30;
  const auto split = run_experiment(cfg);
  const auto mono = oracle::monolithic_losses(cfg);
  ASSERT_EQ(split.size(), mono.size());
  for (std::size_t r = 0; r < mono.size(); ++r) EXPECT_NEAR(split[r].loss, mono[r], 1e-5) << "round " << r;
}

TEST(Simulator, ZeroLearningRateKeepsParameters) {
  SimConfig cfg = small_config();
  cfg.learning_rate = 0.0;
  Simulator sim(cfg);
  const Mat w1 = sim.clients()[0].params.w1;
  const Mat w3 = sim.server().params.w3;
  double first = 0.0;
  for (int r = 0; r < 4; ++r) {
    const auto m = sim.step();
    if (r == 0) first = m.eval_acc;
    EXPECT_EQ(m.eval_acc, first);
  }
  EXPECT_EQ(sim.clients()[0].params.w1, w1);
  EXPECT_EQ(sim.server().params.w3, w3);
}

TEST(Simulator, DeterministicCsv) {
  const SimConfig cfg = small_config();
  EXPECT_EQ(csv_of(cfg), csv_of(cfg));
  SimConfig other = cfg;
  other.seed += 1;
  EXPECT_NE(csv_of(cfg), csv_of(other));
}

TEST(Simulator, CsvLayout) {
  SimConfig cfg = small_config();
  cfg.rounds = 2;
  std::istringstream in(csv_of(cfg));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "round,loss,eval_acc,uplink_bytes,downlink_bytes,sim_time_s,mean_rank,mean_mse");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
  }
  EXPECT_EQ(rows, 2);
}

TEST(Simulator, ByteAccountingAndClock) {
  const SimConfig cfg = small_config();
  Simulator sim(cfg);
  double clock = 0.0;
  for (int r = 0; r < 3; ++r) {
    const RoundMetrics m = sim.step();
    ASSERT_EQ(m.uplink_bytes.size(), cfg.n_clients);
    double slowest = 0.0;
    const LinkModel link{cfg.bandwidth_bps, cfg.latency_s};
    for (std::size_t c = 0; c < cfg.n_clients; ++c) {
      EXPECT_EQ(m.uplink_bytes[c], 20 + 4 * m.uplink_ranks[c] * (cfg.batch_size + cfg.hidden));
      EXPECT_EQ(m.downlink_bytes[c], 20 + 4 * m.downlink_ranks[c] * (cfg.batch_size + cfg.hidden));
      EXPECT_LE(m.uplink_bytes[c] - 20, cfg.tensor_budget());
      slowest = std::max(slowest, link.transfer_time(m.uplink_bytes[c]) + link.transfer_time(m.downlink_bytes[c]));
    }
    EXPECT_DOUBLE_EQ(m.round_time_s, slowest);
    clock += slowest;
    EXPECT_NEAR(m.sim_time_s, clock, 1e-12);
    EXPECT_EQ(m.total_uplink(), std::accumulate(m.uplink_bytes.begin(), m.uplink_bytes.end(), 0ULL));
  }
}

TEST(Simulator, ErrorStatesAreIsolatedPerStream) {
  SimConfig cfg = small_config();
  Simulator sim(cfg);
  sim.step();
  const auto& clients = sim.clients();
  ASSERT_NE(clients[0].uplink.error(), nullptr);
  EXPECT_NE(clients[0].uplink.error()->residual(), clients[1].uplink.error()->residual());
  EXPECT_NE(clients[0].uplink.error()->residual(), sim.server().downlink[0].error()->residual());
  EXPECT_GT(fro_norm(clients[2].uplink.error()->residual()), 0.0);
}

TEST(Simulator, UncompressedDownlinkIsExact) {
  SimConfig cfg = small_config();
  cfg.compress_downlink = false;
  Simulator sim(cfg);
  const RoundMetrics m = sim.step();
  for (auto b : m.downlink_bytes) EXPECT_EQ(b, 20 + 4ULL * cfg.batch_size * cfg.hidden);
}

TEST(Simulator, BudgetFailureNamesStream) {
  SimConfig cfg = small_config();
  cfg.b_max_bytes = 10;
  Simulator sim(cfg);
  try {
    sim.step();
    FAIL() << "infeasible budget accepted";
  } catch (const SimError& e) {
    EXPECT_NE(std::string(e.what()).find("client 0 uplink"), std::string::npos) << e.what();
  }
}

TEST(Simulator, GenerousBudgetTracksLosslessAccuracy) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimConfig cfg;
    cfg.seed = kDefaultSeed + seed;
    cfg.eta = 0.95;
    cfg.b_max_bytes = 1ULL << 30;
    const double lossless = run_experiment(oracle::lossless_config(cfg)).back().eval_acc;
    const double compressed = run_experiment(cfg).back().eval_acc;
    EXPECT_GE(compressed, lossless - 0.03) << "seed " << seed;
  }
}

TEST(Simulator, SeparatedClustersAreLearnable) {
  SimConfig base;
  base.separation = 6.0;
  SimConfig cfg = oracle::lossless_config(base);
  cfg.rounds = 200;
  cfg.eval_every = 50;
  EXPECT_GE(run_experiment(cfg).back().eval_acc, 0.95);
}

TEST(Simulator, UplinkErrorStatesIgnoreOtherClientsData) {
  const SimConfig cfg = small_config();
  Simulator a(cfg), b(cfg);
  b.clients()[0].data.x *= 1.5;
  a.step();
  b.step();
  EXPECT_NE(a.clients()[0].uplink.error()->residual(), b.clients()[0].uplink.error()->residual());
  for (std::size_t j = 1; j < cfg.n_clients; ++j)
    EXPECT_EQ(a.clients()[j].uplink.error()->residual(), b.clients()[j].uplink.error()->residual()) << j;
}

TEST(Simulator, AblationsChangeTheRun) {
  SimConfig cfg = small_config();
  SimConfig no_ecl = cfg;
  no_ecl.apply_ablation(Ablation::kNoEcl);
  EXPECT_TRUE(no_ecl.no_ecl);
  EXPECT_FALSE(no_ecl.compressor_params().nsc.ecl);
  SimConfig single = cfg;
  single.apply_ablation(Ablation::kSingleIteration);
  EXPECT_EQ(single.compressor_params().nsc.oasa.max_iters, 1U);
  EXPECT_NE(csv_of(cfg), csv_of(no_ecl));
}

TEST(Config, ParsesKeysAndComments) {
  const SimConfig cfg = parse_config(
      "# comment\n\nrounds = 7\ncompressor = quant  # trailing\neta=0.5\nwarm_start = true\n", "t");
  EXPECT_EQ(cfg.rounds, 7U);
  EXPECT_EQ(cfg.compressor, Variant::kQuant);
  EXPECT_DOUBLE_EQ(cfg.eta, 0.5);
  EXPECT_TRUE(cfg.warm_start);
}

TEST(Config, ErrorsNameLineAndKey) {
  const auto message = [](std::string_view text) -> std::string {
    try {
      parse_config(text, "bad.cfg");
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("rounds = 3\nbogus = 1\n").find("bad.cfg:2: bogus"), std::string::npos);
  EXPECT_NE(message("eta = 1.5\n").find("eta"), std::string::npos);
  EXPECT_NE(message("rounds = x\n").find("bad.cfg:1: rounds"), std::string::npos);
  EXPECT_NE(message("no equals sign\n").find("bad.cfg:1"), std::string::npos);
  EXPECT_NE(message("compressor = zip\n").find("compressor"), std::string::npos);
  EXPECT_NE(message("r_cap = 0\n").find("r_cap"), std::string::npos);
}

TEST(Config, EveryDocumentedKeyIsSettable) {
  for (const auto& k : config_keys()) {
    SimConfig cfg;
    EXPECT_NO_THROW({
      try {
        set_config_value(cfg, k.key, "1");
      } catch (const ConfigError& e) {
        // Only value errors are acceptable; an unknown key would be a bug.
        if (std::string(e.what()).find("unknown key") != std::string::npos) throw;
      }
    }) << k.key;
    EXPECT_FALSE(k.help.empty());
  }
}

}  // namespace
}  // namespace nsc::sim
