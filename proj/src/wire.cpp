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

#include "nsc/wire.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

namespace nsc::wire {

namespace {

constexpr std::uint64_t kU32Max = std::numeric_limits<std::uint32_t>::max();

class Writer {
 public:
  explicit Writer(std::size_t reserve) { buf_.reserve(reserve); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t> take() && { return std::move(buf_); }
  std::size_t size() const noexcept { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::uint8_t u8() { return b_[pos_++]; }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::size_t pos() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::uint64_t v, const char* what) {
  if (v > kU32Max) throw WireError(std::string("encode: ") + what + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

void write_header(Writer& w, const Header& h) {
  for (auto c : kMagic) w.u8(c);
  w.u8(static_cast<std::uint8_t>(h.tag));
  w.u8(0);
  w.u32(h.m);
  w.u32(h.n);
  w.u32(h.r_or_k);
  w.u16(0);
}

std::uint32_t levels_for(std::uint32_t bits) { return (1U << bits) - 1U; }

std::vector<std::uint8_t> encode_lowrank(const LowRankFactors& f) {
  if (f.p.cols() != f.q.cols()) throw WireError("encode: factor ranks differ");
  const Header h{FormatTag::kLowRank, checked_u32(f.rows(), "m"), checked_u32(f.cols(), "n"),
                 checked_u32(f.rank(), "rank")};
  const std::uint64_t body = h.body_bytes();
  Writer w(kHeaderBytes + body);
  write_header(w, h);
  for (double x : f.p.data()) w.f32(static_cast<float>(x));
  for (double x : f.q.data()) w.f32(static_cast<float>(x));
  assert(w.size() - kHeaderBytes == 4ULL * f.rank() * (f.rows() + f.cols()));
  return std::move(w).take();
}

std::vector<std::uint8_t> encode_topk(const TopKPayload& t) {
  const Header h{FormatTag::kTopK, t.m, t.n, checked_u32(t.entries.size(), "k")};
  const std::uint64_t cells = static_cast<std::uint64_t>(t.m) * t.n;
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    if (t.entries[i].first >= cells) throw WireError("encode: sparse index out of range");
    if (i > 0 && t.entries[i].first <= t.entries[i - 1].first)
      throw WireError("encode: sparse indices not strictly increasing");
  }
  Writer w(kHeaderBytes + h.body_bytes());
  write_header(w, h);
  for (const auto& [index, value] : t.entries) {
    w.u32(index);
    w.f32(value);
  }
  return std::move(w).take();
}

std::vector<std::uint8_t> encode_quant(const QuantPayload& q) {
  if (q.bits < 2 || q.bits > 8) throw WireError("encode: quant bit width must be in [2, 8]");
  if (q.codes.size() != static_cast<std::uint64_t>(q.m) * q.n)
    throw WireError("encode: quant code count does not match shape");
  for (std::uint8_t code : q.codes)
    if (code > levels_for(q.bits) - 1) throw WireError("encode: quant code above top level");
  const Header h{FormatTag::kQuant, q.m, q.n, q.bits};
  Writer w(kHeaderBytes + h.body_bytes());
  write_header(w, h);
  w.f32(q.scale);
  // MSB-first bit packing, last byte zero padded.
  std::uint32_t acc = 0;
  int filled = 0;
  for (std::uint8_t code : q.codes) {
    acc = (acc << q.bits) | code;
    filled += static_cast<int>(q.bits);
    while (filled >= 8) {
      w.u8(static_cast<std::uint8_t>(acc >> (filled - 8)));
      filled -= 8;
      acc &= (1U << filled) - 1U;
    }
  }
  if (filled > 0) w.u8(static_cast<std::uint8_t>(acc << (8 - filled)));
  return std::move(w).take();
}

}  // namespace

std::uint64_t quant_body_bytes(std::uint64_t entries, std::uint32_t bits) {
  return 4 + (entries * bits + 7) / 8;
}

std::uint64_t Header::body_bytes() const {
  const std::uint64_t mm = m;
  const std::uint64_t nn = n;
  switch (tag) {
    case FormatTag::kLowRank:
      return 4ULL * r_or_k * (mm + nn);
    case FormatTag::kTopK:
      return 8ULL * r_or_k;
    case FormatTag::kQuant:
      return quant_body_bytes(mm * nn, r_or_k);
  }
  throw WireError("unknown format tag");
}

std::vector<std::uint8_t> encode(const Payload& payload) {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LowRankFactors>) {
          return encode_lowrank(p);
        } else if constexpr (std::is_same_v<T, TopKPayload>) {
          return encode_topk(p);
        } else {
          return encode_quant(p);
        }
      },
      payload);
}

Header decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes)
    throw WireError("decode: buffer holds " + std::to_string(bytes.size()) +
                    " bytes, header needs " + std::to_string(kHeaderBytes));
  Reader r(bytes);
  for (auto c : kMagic)
    if (r.u8() != c) throw WireError("decode: bad magic");
  const std::uint8_t tag = r.u8();
  if (tag > static_cast<std::uint8_t>(FormatTag::kQuant))
    throw WireError("decode: unknown format tag " + std::to_string(tag));
  if (r.u8() != 0) throw WireError("decode: nonzero padding byte");
  Header h;
  h.tag = static_cast<FormatTag>(tag);
  h.m = r.u32();
  h.n = r.u32();
  h.r_or_k = r.u32();
  if (r.u16() != 0) throw WireError("decode: nonzero reserved field");
  if (h.m == 0 || h.n == 0) throw WireError("decode: zero matrix dimension");
  switch (h.tag) {
    case FormatTag::kLowRank:
      if (h.r_or_k == 0 || h.r_or_k > std::min(h.m, h.n))
        throw WireError("decode: rank " + std::to_string(h.r_or_k) + " out of range");
      break;
    case FormatTag::kTopK:
      if (static_cast<std::uint64_t>(h.r_or_k) > static_cast<std::uint64_t>(h.m) * h.n)
        throw WireError("decode: more sparse entries than matrix cells");
      break;
    case FormatTag::kQuant:
      if (h.r_or_k < 2 || h.r_or_k > 8)
        throw WireError("decode: quant bit width " + std::to_string(h.r_or_k) + " out of range");
      break;
  }
  return h;
}

std::size_t body_size(std::span<const std::uint8_t> bytes) {
  return bytes.size() < kHeaderBytes ? 0 : bytes.size() - kHeaderBytes;
}

Payload decode(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes);
  const std::uint64_t expected = kHeaderBytes + h.body_bytes();
  if (bytes.size() != expected)
    throw WireError("decode: length mismatch, expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(bytes.size()));
  Reader r(bytes.subspan(kHeaderBytes));

  switch (h.tag) {
    case FormatTag::kLowRank: {
      LowRankFactors f{Mat(h.m, h.r_or_k), Mat(h.n, h.r_or_k)};
      for (double& x : f.p.data()) x = r.f32();
      for (double& x : f.q.data()) x = r.f32();
      return f;
    }
    case FormatTag::kTopK: {
      TopKPayload t{h.m, h.n, {}};
      t.entries.reserve(h.r_or_k);
      const std::uint64_t cells = static_cast<std::uint64_t>(h.m) * h.n;
      for (std::uint32_t i = 0; i < h.r_or_k; ++i) {
        const std::uint32_t index = r.u32();
        const float value = r.f32();
        if (index >= cells) throw WireError("decode: sparse index out of range");
        if (!t.entries.empty() && index <= t.entries.back().first)
          throw WireError("decode: sparse indices not strictly increasing");
        t.entries.emplace_back(index, value);
      }
      return t;
    }
    case FormatTag::kQuant: {
      QuantPayload q{h.m, h.n, h.r_or_k, r.f32(), {}};
      const std::uint64_t cells = static_cast<std::uint64_t>(h.m) * h.n;
      q.codes.reserve(cells);
      const auto packed = bytes.subspan(kHeaderBytes + 4);
      const std::uint32_t max_code = levels_for(q.bits) - 1;
      std::uint64_t bit = 0;
      for (std::uint64_t i = 0; i < cells; ++i) {
        std::uint32_t code = 0;
        for (std::uint32_t b = 0; b < q.bits; ++b, ++bit) {
          const std::uint8_t byte = packed[bit / 8];
          code = (code << 1) | ((byte >> (7 - bit % 8)) & 1U);
        }
        if (code > max_code) throw WireError("decode: quant code above top level");
        q.codes.push_back(static_cast<std::uint8_t>(code));
      }
      for (; bit % 8 != 0; ++bit)
        if ((packed[bit / 8] >> (7 - bit % 8)) & 1U) throw WireError("decode: nonzero quant padding bits");
      return q;
    }
  }
  throw WireError("decode: unknown format tag");
}

Mat reconstruct(const Payload& payload) {
  if (const auto* f = std::get_if<LowRankFactors>(&payload)) return decompress(*f);
  if (const auto* t = std::get_if<TopKPayload>(&payload)) {
    Mat out(t->m, t->n);
    for (const auto& [index, value] : t->entries) out.data()[index] = value;
    return out;
  }
  const auto& q = std::get<QuantPayload>(payload);
  Mat out(q.m, q.n);
  const double step = 2.0 * q.scale / static_cast<double>(levels_for(q.bits) - 1);
  for (std::size_t i = 0; i < q.codes.size(); ++i)
    out.data()[i] = -static_cast<double>(q.scale) + q.codes[i] * step;
  return out;
}

}  // namespace nsc::wire
