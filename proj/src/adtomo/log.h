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

// Minimal leveled logging to stderr. The level comes from the
// ADTOMO_LOG_LEVEL environment variable: "error", "warning" (default),
// "info" or "debug".

#ifndef ADTOMO_LOG_H_
#define ADTOMO_LOG_H_

#include "absl/strings/string_view.h"

namespace adtomo {

enum class LogLevel { kError = 0, kWarning = 1, kInfo = 2, kDebug = 3 };

LogLevel CurrentLogLevel();
void Log(LogLevel level, absl::string_view message);

}  // namespace adtomo

#endif  // ADTOMO_LOG_H_
