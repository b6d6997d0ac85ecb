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

#ifndef ADTOMO_BLOCKING_H_
#define ADTOMO_BLOCKING_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace adtomo {

// The largest tracker universe a bitmask can encode.
inline constexpr size_t kMaxTrackers = 63;

// A set of blocked tracker organizations. Bit i refers to the i-th tracker
// id in lexicographic order.
struct BlockingConfig {
  uint64_t mask = 0;

  bool Blocks(size_t tracker_index) const {
    return (mask >> tracker_index) & 1U;
  }
  bool empty() const { return mask == 0; }

  // One 0/1 flag per tracker; the feature encoding used by the forest.
  std::vector<uint8_t> AsFeatures(size_t num_trackers) const {
    std::vector<uint8_t> out(num_trackers);
    for (size_t i = 0; i < num_trackers; ++i) out[i] = Blocks(i) ? 1 : 0;
    return out;
  }

  friend bool operator==(const BlockingConfig&,
                         const BlockingConfig&) = default;
};

}  // namespace adtomo

#endif  // ADTOMO_BLOCKING_H_
