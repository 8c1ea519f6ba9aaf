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

#include "nsc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace nsc {

namespace {

enum SeedPurpose : std::uint64_t { kSpectralSeed = 1, kOasaSeed = 2, kBaselineSeed = 3, kWarmSeed = 4 };

// Warm-start basis of rank r from the previous call's basis.
std::optional<Mat> adapt_basis(const std::optional<Mat>& prev, std::size_t n, std::size_t r,
                               RngSeed seed) {
  if (!prev || prev->rows() != n) return std::nullopt;
  if (prev->cols() == r) return prev;
  if (prev->cols() > r) return prev->left_columns(r);
  Mat grown = gaussian(n, r, seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < prev->cols(); ++j) grown(i, j) = (*prev)(i, j);
  return orthonormalize(grown);
}

}  // namespace

wire::TopKPayload randtopk_compress(const Mat& m, std::uint64_t byte_budget, double random_frac,
                                    RngSeed seed) {
  if (byte_budget < 8) throw BudgetError("randtopk: budget below one 8-byte entry");
  if (!(random_frac >= 0.0 && random_frac <= 1.0))
    throw Error("randtopk: random_frac must lie in [0, 1]");
  const std::size_t cells = m.size();
  const std::size_t k = static_cast<std::size_t>(std::min<std::uint64_t>(byte_budget / 8, cells));
  const auto n_top = static_cast<std::size_t>(std::ceil((1.0 - random_frac) * static_cast<double>(k)));
  const std::size_t n_rand = k - std::min(n_top, k);

  const auto data = m.data();
  std::vector<std::uint32_t> order(cells);
  std::iota(order.begin(), order.end(), 0U);
  const auto by_magnitude = [&](std::uint32_t a, std::uint32_t b) {
    const double ma = std::abs(data[a]);
    const double mb = std::abs(data[b]);
    return ma != mb ? ma > mb : a < b;
  };
  const std::size_t top = std::min(n_top, k);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    by_magnitude);

  // Partial Fisher-Yates over the non-top positions.
  std::mt19937_64 gen(seed.value);
  for (std::size_t i = 0; i < n_rand; ++i) {
    std::uniform_int_distribution<std::size_t> pick(top + i, cells - 1);
    std::swap(order[top + i], order[pick(gen)]);
  }

  std::vector<std::uint32_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(kept.begin(), kept.end());
  wire::TopKPayload out{static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols()), {}};
  out.entries.reserve(k);
  for (std::uint32_t idx : kept) out.entries.emplace_back(idx, static_cast<float>(data[idx]));
  return out;
}

wire::QuantPayload quant_compress(const Mat& m, std::uint32_t bits, RngSeed seed) {
  if (bits < 2 || bits > 8) throw Error("quant: bit width must be in [2, 8]");
  wire::QuantPayload out{static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols()),
                         bits, 0.0F, std::vector<std::uint8_t>(m.size(), 0)};
  double max_abs = 0.0;
  for (double x : m.data()) max_abs = std::max(max_abs, std::abs(x));
  out.scale = static_cast<float>(max_abs);
  const double s = out.scale;
  if (s == 0.0) return out;

  const std::uint32_t top = (1U << bits) - 2U;  // highest code
  const double step = 2.0 * s / top;
  std::mt19937_64 gen(seed.value);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double pos = std::clamp((m.data()[i] + s) / step, 0.0, static_cast<double>(top));
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < 1e-9) pos = nearest;
    const double lower = std::floor(pos);
    const double frac = pos - lower;
    const double u = unit(gen);
    auto code = static_cast<std::uint32_t>(lower) + (u < frac ? 1U : 0U);
    out.codes[i] = static_cast<std::uint8_t>(std::min(code, top));
  }
  return out;
}

std::uint32_t quant_bits_for_budget(std::uint64_t entries, std::uint64_t byte_budget,
                                    std::uint32_t max_bits) {
  for (std::uint32_t b = std::min<std::uint32_t>(max_bits, 8); b >= 2; --b)
    if (wire::quant_body_bytes(entries, b) <= byte_budget) return b;
  return 0;
}

LowRankFactors fixedrank_compress(const Mat& m, std::size_t rank, std::size_t iters, RngSeed seed) {
  OasaConfig cfg;
  cfg.max_iters = iters;
  cfg.min_iters = iters;
  cfg.seed = seed;
  ErrorState unused(m.rows(), m.cols());
  return compress(m, rank, cfg, unused, false).factors;
}

// ---- interface -------------------------------------------------------------------

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kNsc: return "nsc";
    case Variant::kRandTopK: return "randtopk";
    case Variant::kQuant: return "quant";
    case Variant::kFixedRank: return "fixedrank";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kNsc, Variant::kRandTopK, Variant::kQuant, Variant::kFixedRank})
    if (variant_name(v) == name) return v;
  throw Error("unknown compressor '" + std::string(name) +
              "' (expected nsc, randtopk, quant or fixedrank)");
}

RngSeed Stream::next_seed(std::uint64_t purpose) { return derive_seed(seed_, purpose, calls_); }

ErrorState& Stream::error_for(std::size_t rows, std::size_t cols) {
  if (!error_ || error_->shape() != std::pair{rows, cols}) error_.emplace(rows, cols);
  return *error_;
}

Mat Compressor::decompress(std::span<const std::uint8_t> bytes) const {
  return wire::reconstruct(wire::decode(bytes));
}

CompressOutcome NscCompressor::compress(const Mat& m, std::uint64_t byte_budget,
                                        Stream& stream) const {
  RankPolicy policy{opts_.eta, byte_budget, opts_.r_cap};
  SpectralConfig spectral = opts_.spectral;
  spectral.seed = stream.next_seed(kSpectralSeed);
  const RankDecision decision = select_rank(m, policy, spectral);

  OasaConfig oasa = opts_.oasa;
  oasa.seed = stream.next_seed(kOasaSeed);
  std::optional<Mat> warm;
  if (opts_.warm_start)
    warm = adapt_basis(stream.last_q(), m.cols(), decision.r_final, stream.next_seed(kWarmSeed));

  ErrorState& state = stream.error_for(m.rows(), m.cols());
  OasaResult res = nsc::compress(m, decision.r_final, oasa, state, opts_.ecl, warm);
  stream.last_q() = res.factors.q;
  stream.tick();
  return {wire::encode(res.factors), decision.r_final, res.iters_used};
}

CompressOutcome RandTopKCompressor::compress(const Mat& m, std::uint64_t byte_budget,
                                             Stream& stream) const {
  auto payload = randtopk_compress(m, byte_budget, random_frac_, stream.next_seed(kBaselineSeed));
  stream.tick();
  const std::size_t k = payload.entries.size();
  return {wire::encode(payload), k, 0};
}

CompressOutcome QuantCompressor::compress(const Mat& m, std::uint64_t byte_budget,
                                          Stream& stream) const {
  const std::uint32_t bits = quant_bits_for_budget(m.size(), byte_budget, max_bits_);
  if (bits == 0)
    throw BudgetError("quant: budget of " + std::to_string(byte_budget) +
                      " bytes below a 2-bit payload of " +
                      std::to_string(wire::quant_body_bytes(m.size(), 2)) + " bytes");
  auto payload = quant_compress(m, bits, stream.next_seed(kBaselineSeed));
  stream.tick();
  return {wire::encode(payload), bits, 0};
}

CompressOutcome FixedRankCompressor::compress(const Mat& m, std::uint64_t byte_budget,
                                              Stream& stream) const {
  const std::size_t fit = rank_for_bandwidth(m.rows(), m.cols(), byte_budget);
  if (fit == 0)
    throw BudgetError("fixedrank: budget below rank-1 payload of " +
                      std::to_string(factor_bytes(m.rows(), m.cols(), 1)) + " bytes");
  const std::size_t r = std::min({rank_, fit, std::min(m.rows(), m.cols())});
  auto factors = fixedrank_compress(m, r, iters_, stream.next_seed(kOasaSeed));
  stream.tick();
  return {wire::encode(factors), r, iters_};
}

std::unique_ptr<Compressor> make_compressor(Variant v, const CompressorParams& params) {
  switch (v) {
    case Variant::kNsc: return std::make_unique<NscCompressor>(params.nsc);
    case Variant::kRandTopK: return std::make_unique<RandTopKCompressor>(params.random_frac);
    case Variant::kQuant: return std::make_unique<QuantCompressor>(params.quant_bits);
    case Variant::kFixedRank:
      return std::make_unique<FixedRankCompressor>(params.fixed_rank, params.fixed_iters);
  }
  throw Error("unknown compressor variant");
}

}  // namespace nsc
