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

#include "nsc/goldens.hpp"

namespace nsc::wire {

std::vector<GoldenVector> golden_vectors() {
  std::vector<GoldenVector> out;
  out.push_back({"lowrank_2x3_r1.bin", LowRankFactors{Mat{{1.0}, {2.0}}, Mat{{0.5}, {-0.25}, {1.0}}}});
  out.push_back({"lowrank_3x2_r2.bin",
                 LowRankFactors{Mat{{1.5, -2.0}, {0.0, 3.0}, {-1.0, 0.125}}, Mat{{0.6, 0.8}, {0.8, -0.6}}}});
  out.push_back({"topk_3x3_k2.bin", TopKPayload{3, 3, {{1, -7.0F}, {4, 5.5F}}}});
  out.push_back({"quant_2x2_b3.bin", QuantPayload{2, 2, 3, 2.0F, {0, 3, 6, 1}}});
  return out;
}

bool same_payload(const Payload& a, const Payload& b) {
  if (a.index() != b.index()) return false;
  if (const auto* fa = std::get_if<LowRankFactors>(&a)) {
    const auto& fb = std::get<LowRankFactors>(b);
    return fa->p == fb.p && fa->q == fb.q;
  }
  if (const auto* ta = std::get_if<TopKPayload>(&a)) {
    const auto& tb = std::get<TopKPayload>(b);
    return ta->m == tb.m && ta->n == tb.n && ta->entries == tb.entries;
  }
  const auto& qa = std::get<QuantPayload>(a);
  const auto& qb = std::get<QuantPayload>(b);
  return qa.m == qb.m && qa.n == qb.n && qa.bits == qb.bits && qa.scale == qb.scale && qa.codes == qb.codes;
}

}  // namespace nsc::wire
