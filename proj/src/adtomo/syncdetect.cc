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

#include "adtomo/syncdetect.h"

#include <algorithm>
#include <map>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace adtomo::syncdetect {
namespace {

using PairMap = std::map<std::pair<std::string, std::string>, std::vector<Evidence>>;

std::vector<SyncPair> Flatten(PairMap& m) {
  std::vector<SyncPair> out;
  for (auto& [key, evidence] : m) {
    std::sort(evidence.begin(), evidence.end());
    out.push_back({key.first, key.second, std::move(evidence)});
  }
  return out;
}

}  // namespace

absl::StatusOr<SyncDetection> DetectCookieSync(
    std::span<const ecosim::RequestLogEntry> log) {
  using ChainKey = std::tuple<int, std::string, int>;
  std::map<ChainKey, std::vector<const ecosim::RequestLogEntry*>> chains;
  for (const auto& e : log) {
    chains[{e.run, e.persona, e.chain}].push_back(&e);
  }

  PairMap strong, weak;
  for (auto& [key, hops] : chains) {
    std::sort(hops.begin(), hops.end(), [](const auto* a, const auto* b) {
      return a->chain_position < b->chain_position;
    });
    for (size_t i = 0; i < hops.size(); ++i) {
      if (hops[i]->chain_position != static_cast<int>(i)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "malformed chain (run ", std::get<0>(key), ", persona ",
            std::get<1>(key), ", chain ", std::get<2>(key),
            "): expected position ", i, ", found ", hops[i]->chain_position));
      }
    }
    for (const auto* hop : hops) {
      if (hop->source_domain == hop->destination_domain) continue;
      if (!hop->cookie_sent.has_value() ||
          ecosim::IdentifierOwner(*hop->cookie_sent) != hop->destination_domain) {
        continue;
      }
      const bool uid_from_source =
          hop->uid_param.has_value() &&
          ecosim::IdentifierOwner(*hop->uid_param) == hop->source_domain;
      // A first hop that carries only the destination's own cookie is an
      // ordinary page request, not a weak sync candidate.
      if (!uid_from_source && hop->chain_position == 0) continue;
      PairMap& target = uid_from_source ? strong : weak;
      target[{hop->source_domain, hop->destination_domain}].push_back(
          {hop->run, hop->persona, hop->chain_position});
    }
  }
  return SyncDetection{Flatten(strong), Flatten(weak)};
}

}  // namespace adtomo::syncdetect
