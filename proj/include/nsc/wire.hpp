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

#ifndef NSC_WIRE_HPP
#define NSC_WIRE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "nsc/oasa.hpp"
#include "nsc/tensor.hpp"

namespace nsc::wire {

/// Malformed or truncated buffer.
class WireError : public Error {
 public:
  using Error::Error;
};

enum class FormatTag : std::uint8_t { kLowRank = 0, kTopK = 1, kQuant = 2 };

inline constexpr std::array<std::uint8_t, 4> kMagic{'N', 'S', 'C', '1'};
inline constexpr std::size_t kHeaderBytes = 20;

// Header layout, little-endian:
//   [0,4) magic "NSC1" | [4] tag | [5] pad (0) | [6,10) m | [10,14) n
//   [14,18) r_or_k | [18,20) reserved (0)
struct Header {
  FormatTag tag = FormatTag::kLowRank;
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::uint32_t r_or_k = 0;  // rank, kept entry count, or bit width

  /// Body length implied by the header alone.
  std::uint64_t body_bytes() const;
};

/// Sparse entries: (flat row-major index, value), sorted by index.
struct TopKPayload {
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, float>> entries;
};

/// Uniform stochastic quantization: code c maps to -scale + c * 2 scale / (2^bits - 2).
struct QuantPayload {
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::uint32_t bits = 8;
  float scale = 0.0F;
  std::vector<std::uint8_t> codes;  // one per entry, row-major, unpacked
};

using Payload = std::variant<LowRankFactors, TopKPayload, QuantPayload>;

std::uint64_t quant_body_bytes(std::uint64_t entries, std::uint32_t bits);

std::vector<std::uint8_t> encode(const Payload& payload);
Payload decode(std::span<const std::uint8_t> bytes);

Header decode_header(std::span<const std::uint8_t> bytes);
/// Bytes after the 20-byte header.
std::size_t body_size(std::span<const std::uint8_t> bytes);

/// Dense m x n reconstruction of any payload.
Mat reconstruct(const Payload& payload);

}  // namespace nsc::wire

#endif  // NSC_WIRE_HPP
