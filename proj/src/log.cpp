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

#include "nsc/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace nsc {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("NSC_LOG");
    const std::string v = env ? env : "";
    if (v == "error") return LogLevel::kError;
    if (v == "info") return LogLevel::kInfo;
    if (v == "debug") return LogLevel::kDebug;
    return LogLevel::kWarn;
  }();
  return level;
}

void log(LogLevel level, std::string_view message) {
  if (level > log_level()) return;
  static constexpr const char* kTags[] = {"error", "warn", "info", "debug"};
  std::cerr << "[nsc " << kTags[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace nsc
