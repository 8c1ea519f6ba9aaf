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

#ifndef NSC_BASELINES_HPP
#define NSC_BASELINES_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsc/oasa.hpp"
#include "nsc/rank_select.hpp"
#include "nsc/spectral.hpp"
#include "nsc/tensor.hpp"
#include "nsc/wire.hpp"

namespace nsc {

// ---- standalone reference compressors -----------------------------------------

/// Keeps the k = floor(budget / 8) entries that fit the budget: the
/// ceil((1 - random_frac) k) largest magnitudes (ties to the lower flat index)
/// plus a uniform sample of the remaining positions. Throws BudgetError below
/// one 8-byte entry.
wire::TopKPayload randtopk_compress(const Mat& m, std::uint64_t byte_budget, double random_frac,
                                    RngSeed seed);

/// Stochastic rounding onto 2^bits - 1 uniform levels spanning
/// [-max|m|, max|m|]; unbiased per entry.
wire::QuantPayload quant_compress(const Mat& m, std::uint32_t bits, RngSeed seed);

/// Widest bit width in [2, max_bits] whose quant body fits the budget, or 0.
std::uint32_t quant_bits_for_budget(std::uint64_t entries, std::uint64_t byte_budget,
                                    std::uint32_t max_bits = 8);

/// Plain fixed-rank alternating iteration: no error feedback, no early stop,
/// exactly `iters` iterations from a random start.
LowRankFactors fixedrank_compress(const Mat& m, std::size_t rank, std::size_t iters, RngSeed seed);

// ---- shared compressor interface -------------------------------------------------

enum class Variant { kNsc, kRandTopK, kQuant, kFixedRank };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

/// Per-stream memory: error-feedback residual, the last right basis for warm
/// starts, and a call counter that feeds per-call seeds.
class Stream {
 public:
  Stream(std::string name, RngSeed seed) : name_(std::move(name)), seed_(seed) {}

  const std::string& name() const noexcept { return name_; }
  RngSeed next_seed(std::uint64_t purpose);
  /// Error state for an m x n stream; recreated (zeroed) if the shape changed.
  ErrorState& error_for(std::size_t rows, std::size_t cols);
  const ErrorState* error() const noexcept { return error_ ? &*error_ : nullptr; }
  std::optional<Mat>& last_q() noexcept { return last_q_; }
  std::uint64_t calls() const noexcept { return calls_; }
  void tick() noexcept { ++calls_; }

 private:
  std::string name_;
  RngSeed seed_;
  std::uint64_t calls_ = 0;
  std::optional<ErrorState> error_;
  std::optional<Mat> last_q_;
};

struct CompressOutcome {
  std::vector<std::uint8_t> bytes;  // full wire message, header included
  std::size_t rank_or_k = 0;
  std::size_t iters = 0;
};

/// Common surface of every variant. The budget bounds the payload body; the
/// 20-byte wire header rides on top of it.
class Compressor {
 public:
  virtual ~Compressor() = default;
  virtual Variant variant() const noexcept = 0;
  virtual CompressOutcome compress(const Mat& m, std::uint64_t byte_budget, Stream& stream) const = 0;
  Mat decompress(std::span<const std::uint8_t> bytes) const;
};

struct NscOptions {
  double eta = 0.9;
  std::size_t r_cap = 32;
  SpectralConfig spectral{};
  OasaConfig oasa{};
  bool ecl = true;
  bool warm_start = false;
};

class NscCompressor final : public Compressor {
 public:
  explicit NscCompressor(NscOptions opts) : opts_(std::move(opts)) {}

  Variant variant() const noexcept override { return Variant::kNsc; }
  CompressOutcome compress(const Mat& m, std::uint64_t byte_budget, Stream& stream) const override;
  const NscOptions& options() const noexcept { return opts_; }

 private:
  NscOptions opts_;
};

class RandTopKCompressor final : public Compressor {
 public:
  explicit RandTopKCompressor(double random_frac) : random_frac_(random_frac) {}

  Variant variant() const noexcept override { return Variant::kRandTopK; }
  CompressOutcome compress(const Mat& m, std::uint64_t byte_budget, Stream& stream) const override;

 private:
  double random_frac_;
};

class QuantCompressor final : public Compressor {
 public:
  /// Uses the widest width up to max_bits that fits the budget.
  explicit QuantCompressor(std::uint32_t max_bits) : max_bits_(max_bits) {}

  Variant variant() const noexcept override { return Variant::kQuant; }
  CompressOutcome compress(const Mat& m, std::uint64_t byte_budget, Stream& stream) const override;

 private:
  std::uint32_t max_bits_;
};

class FixedRankCompressor final : public Compressor {
 public:
  /// The rank is truncated to what the budget can carry.
  FixedRankCompressor(std::size_t rank, std::size_t iters) : rank_(rank), iters_(iters) {}

  Variant variant() const noexcept override { return Variant::kFixedRank; }
  CompressOutcome compress(const Mat& m, std::uint64_t byte_budget, Stream& stream) const override;

 private:
  std::size_t rank_;
  std::size_t iters_;
};

struct CompressorParams {
  NscOptions nsc{};
  double random_frac = 0.1;
  std::uint32_t quant_bits = 8;
  std::size_t fixed_rank = 4;
  std::size_t fixed_iters = 1;
};

std::unique_ptr<Compressor> make_compressor(Variant v, const CompressorParams& params);

}  // namespace nsc

#endif  // NSC_BASELINES_HPP
