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

// Built-in configuration profiles.
//
//   small        6 trackers, 5 advertisers, 4 planted edges, 64 + 20 personas
//   small-empty  the small world with no sharing edges
//   single-edge  the small world with one planted edge
//   h1           three interest groups with partly shared vocabulary
//   desk         10 trackers, 9 advertisers, 1024 + 100 personas

#ifndef ADTOMO_PROFILES_H_
#define ADTOMO_PROFILES_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "adtomo/config.h"

namespace adtomo {

std::vector<std::string> ProfileNames();

// InvalidArgument for an unknown name.
absl::StatusOr<PipelineConfig> Profile(absl::string_view name);

}  // namespace adtomo

#endif  // ADTOMO_PROFILES_H_
