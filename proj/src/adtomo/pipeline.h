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

// End-to-end pipeline: in-memory stage functions plus file-backed stages
// that read and write the artifact formats in an output directory.
//
// Artifacts:
//   world.json          resolved world
//   adlog.jsonl         delivered creatives
//   requestlog.jsonl    redirect chains
//   bidlog.jsonl        client-visible bids
//   syncpairs.json      cookie-sync detection
//   corpus.json         global vocabulary
//   records.jsonl       flagged vector records of blocking personas
//   control_records.jsonl
//   report.json, report.csv
//   evaluation.json     precision and recall against the planted graph
//   h1.json, h1.csv     interest-group similarity matrix

#ifndef ADTOMO_PIPELINE_H_
#define ADTOMO_PIPELINE_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "adtomo/config.h"
#include "adtomo/ecosim.h"
#include "adtomo/syncdetect.h"
#include "adtomo/textvec.h"
#include "adtomo/tomography.h"

namespace adtomo {

struct SimulationArtifacts {
  ecosim::World world;
  std::vector<ecosim::Persona> personas;
  ecosim::SimulationLogs logs;
};

struct FlagArtifacts {
  textvec::Corpus corpus;
  std::vector<tomography::VectorRecord> records;  // non-control, flagged
  std::vector<tomography::VectorRecord> control_records;
};

struct InferenceArtifacts {
  std::vector<int> holdout_runs;
  std::vector<tomography::AdvertiserReport> rows;
};

absl::StatusOr<SimulationArtifacts> SimulateStage(const PipelineConfig& config);

absl::StatusOr<FlagArtifacts> FlagStage(
    const PipelineConfig& config, const ecosim::World& world,
    std::span<const ecosim::Persona> personas,
    std::span<const ecosim::AdRecord> ads);

absl::StatusOr<InferenceArtifacts> InferStage(
    const PipelineConfig& config, const ecosim::World& world,
    std::span<const ecosim::Persona> personas,
    std::span<const tomography::VectorRecord> records);

// Simulate, flag, infer and evaluate without touching the disk.
struct InMemoryResult {
  SimulationArtifacts simulation;
  FlagArtifacts flags;
  InferenceArtifacts inference;
  tomography::Evaluation evaluation;
};
absl::StatusOr<InMemoryResult> RunInMemory(const PipelineConfig& config);

// Process exit code for a status: 0 ok, 2 usage or configuration, 3 I/O,
// 1 anything else.
int ExitCodeFor(const absl::Status& status);

// File-backed stages. Inputs are read from input_dir (default: output_dir)
// and artifacts are written to output_dir.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  const PipelineConfig& config() const { return config_; }
  void set_seed(uint64_t seed) { SetSeed(config_, seed); }
  void set_output_dir(std::string dir) { config_.output_dir = std::move(dir); }
  void set_input_dir(std::string dir) { input_dir_ = std::move(dir); }
  const std::string& input_dir() const;

  absl::Status Simulate();
  absl::Status SyncDetect();
  absl::Status Flag();
  absl::Status Infer();
  absl::Status Evaluate();
  // Groups documents from the ad log by persona interest group, or reads
  // {key, tokens} documents from documents_path when given.
  absl::Status H1(const std::optional<std::string>& documents_path);
  // Simulate, SyncDetect, Flag, Infer, Evaluate.
  absl::Status Run();

 private:
  absl::StatusOr<SimulationArtifacts> LoadWorld() const;

  PipelineConfig config_;
  std::optional<std::string> input_dir_;
};

}  // namespace adtomo

#endif  // ADTOMO_PIPELINE_H_
