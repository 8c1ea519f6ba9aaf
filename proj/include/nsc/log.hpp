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

#ifndef NSC_LOG_HPP
#define NSC_LOG_HPP

#include <string_view>

namespace nsc {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

/// Threshold from the NSC_LOG environment variable (error, warn, info,
/// debug); warn when unset or unrecognized.
LogLevel log_level();

void log(LogLevel level, std::string_view message);

}  // namespace nsc

#endif  // NSC_LOG_HPP
