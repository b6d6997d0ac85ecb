// Copyright 2026 The Adtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adtomo/log.h"

#include <cstdlib>
#include <iostream>
#include <string>

namespace adtomo {

LogLevel CurrentLogLevel() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ADTOMO_LOG_LEVEL");
    if (env == nullptr) return LogLevel::kWarning;
    const std::string v(env);
    if (v == "error") return LogLevel::kError;
    if (v == "info") return LogLevel::kInfo;
    if (v == "debug") return LogLevel::kDebug;
    return LogLevel::kWarning;
  }();
  return level;
}

void Log(LogLevel level, absl::string_view message) {
  if (level > CurrentLogLevel()) return;
  static constexpr const char* kNames[] = {"E", "W", "I", "D"};
  std::cerr << kNames[static_cast<int>(level)] << " adtomo: " << message
            << '\n';
}

}  // namespace adtomo
