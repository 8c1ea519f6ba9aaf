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

#ifndef NSC_GOLDENS_HPP
#define NSC_GOLDENS_HPP

#include <string>
#include <vector>

#include "nsc/wire.hpp"

namespace nsc::wire {

/// A fixed payload and the file name its encoding is stored under.
struct GoldenVector {
  std::string file;
  Payload payload;
};

/// The reference payloads checked into tests/golden, one per format tag.
std::vector<GoldenVector> golden_vectors();

/// True when both payloads hold the same variant with identical contents.
bool same_payload(const Payload& a, const Payload& b);

}  // namespace nsc::wire

#endif  // NSC_GOLDENS_HPP
