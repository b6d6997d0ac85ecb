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

// Configuration files: the simulation world and run plan plus analysis
// settings, parsed with field-path diagnostics.

#ifndef ADTOMO_CONFIG_H_
#define ADTOMO_CONFIG_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "adtomo/ecosim.h"
#include "adtomo/forest.h"
#include "adtomo/stattest.h"
#include "json.hpp"

namespace adtomo {

struct PipelineConfig {
  ecosim::SimConfig sim;
  stats::StatConfig stats;
  forest::HyperGrid grid = forest::HyperGrid::Default();
  int folds = 4;
  int holdout_runs = 2;
  double accuracy_threshold = 0.6;
  // Master seed; equal to sim.run.seed.
  uint64_t seed = 0;
  std::string output_dir = "out";
};

absl::StatusOr<ecosim::SimConfig> ParseSimConfig(const nlohmann::json& j);

// Parses and validates, including cross-field checks.
absl::StatusOr<PipelineConfig> ParsePipelineConfig(const nlohmann::json& j);
absl::StatusOr<PipelineConfig> ParsePipelineConfigText(absl::string_view text);
absl::StatusOr<PipelineConfig> LoadPipelineConfig(const std::string& path);

// Cross-field consistency: holdout_runs < runs and folds dividing the
// number of cross-validation runs.
absl::Status ValidatePipelineConfig(const PipelineConfig& config);

void SetSeed(PipelineConfig& config, uint64_t seed);

nlohmann::ordered_json SimConfigToJson(const ecosim::SimConfig& config);
nlohmann::ordered_json PipelineConfigToJson(const PipelineConfig& config);

}  // namespace adtomo

#endif  // ADTOMO_CONFIG_H_
