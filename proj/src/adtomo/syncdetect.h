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

// Cookie-sync detection over redirect chains.

#ifndef ADTOMO_SYNCDETECT_H_
#define ADTOMO_SYNCDETECT_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "adtomo/ecosim.h"

namespace adtomo::syncdetect {

struct Evidence {
  int run = 0;
  std::string persona;
  int chain_position = 0;
  friend auto operator<=>(const Evidence&, const Evidence&) = default;
};

struct SyncPair {
  std::string initiator;
  std::string receiver;
  std::vector<Evidence> evidence;  // sorted
};

struct SyncDetection {
  // Hops where the receiver gets its own cookie and the initiator's uid.
  std::vector<SyncPair> pairs;
  // Redirect hops (position > 0) where the receiver gets its own cookie
  // without the initiator's uid.
  std::vector<SyncPair> weak;
};

// Chains are keyed by (run, persona, chain) and must number their hops
// 0, 1, 2, ... without gaps. Input order does not matter.
absl::StatusOr<SyncDetection> DetectCookieSync(
    std::span<const ecosim::RequestLogEntry> log);

}  // namespace adtomo::syncdetect

#endif  // ADTOMO_SYNCDETECT_H_
