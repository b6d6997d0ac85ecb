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

// Tracker -> advertiser relationship inference from delivered ad text:
// blocking-configuration personas, per-advertiser vector records, chi-square
// change flags, and random forest attribution.

#ifndef ADTOMO_TOMOGRAPHY_H_
#define ADTOMO_TOMOGRAPHY_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "adtomo/blocking.h"
#include "adtomo/ecosim.h"
#include "adtomo/forest.h"
#include "adtomo/stattest.h"
#include "adtomo/textvec.h"

namespace adtomo::tomography {

// All 2^k subsets of k trackers in ascending bitmask order; index 0 blocks
// nothing.
std::vector<BlockingConfig> EnumerateBlockingConfigs(size_t num_trackers);

struct VectorRecord {
  std::string advertiser;
  std::string persona;
  int run = 0;
  textvec::CountVector vector;
  // Set by FlagChanges.
  std::optional<bool> is_different_from_control;
};

// Corpus over every token in the ad log.
textvec::Corpus AdLogCorpus(std::span<const ecosim::AdRecord> ads);

// One record per (advertiser, persona, run) that received ads, holding the
// sum of the creatives' count vectors. Sorted by (advertiser, persona, run).
absl::StatusOr<std::vector<VectorRecord>> Collate(
    std::span<const ecosim::AdRecord> ads, const textvec::Corpus& corpus);

// Adds all-zero records for (advertiser, persona, run) triples that received
// no ads, so every pair has one record per run.
std::vector<VectorRecord> CompleteRecords(
    std::vector<VectorRecord> records, std::span<const std::string> advertisers,
    std::span<const std::string> personas, int runs,
    const textvec::Corpus& corpus);

// Tests each record against the pooled control vector of the same
// (advertiser, run). A record with no ads, or a table too sparse for the
// test, is not flagged.
absl::StatusOr<std::vector<VectorRecord>> FlagChanges(
    std::span<const VectorRecord> records,
    std::span<const VectorRecord> control_records,
    const stats::StatConfig& config);

struct Segmentation {
  std::vector<VectorRecord> cv;
  std::vector<VectorRecord> holdout;
  std::vector<int> holdout_runs;
};

// Holds out the same randomly chosen runs for every (advertiser, persona).
absl::StatusOr<Segmentation> SegmentRecords(std::span<const VectorRecord> records,
                                            int runs, int holdout_runs,
                                            uint64_t seed);

// Trackers whose gain exceeds mean + one population standard deviation,
// provided the model clears the accuracy threshold.
std::vector<size_t> InferRelationships(
    const forest::FeatureImportance& importance, double holdout_accuracy,
    double accuracy_threshold);

struct InferenceOptions {
  forest::HyperGrid grid = forest::HyperGrid::Default();
  int folds = 4;
  double accuracy_threshold = 0.6;
  uint64_t seed = 0;
};

struct AdvertiserReport {
  std::string advertiser;
  forest::ForestParams best_params;
  double cv_accuracy = 0.0;
  // Unset when there is no holdout data; the gate then uses cv_accuracy.
  std::optional<double> holdout_accuracy;
  std::vector<double> importance;  // aligned with the tracker list
  std::vector<std::string> inferred;
  size_t cv_records = 0;
  size_t cv_flagged = 0;
  size_t holdout_records = 0;
};

// Per advertiser: grid-searched cross-validation, a final forest on the whole
// CV set, holdout accuracy, importances, and the inferred tracker set.
// `blocking` maps every persona in the records to its blocking config over
// `trackers`. Rows are sorted by advertiser id.
absl::StatusOr<std::vector<AdvertiserReport>> RunInference(
    std::span<const VectorRecord> cv, std::span<const VectorRecord> holdout,
    const std::map<std::string, BlockingConfig>& blocking,
    std::span<const std::string> trackers, const InferenceOptions& options);

struct Edge {
  std::string tracker;
  std::string advertiser;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

std::vector<Edge> InferredEdges(std::span<const AdvertiserReport> rows);

struct Evaluation {
  double precision = 1.0;
  double recall = 1.0;
  size_t true_positives = 0;
  size_t false_positives = 0;
  size_t false_negatives = 0;
};

// Edge-set precision and recall. An empty inferred set has precision 1; an
// empty truth has recall 1.
Evaluation Evaluate(std::span<const Edge> inferred,
                    const ecosim::SharingGraph& truth);

// One document per (group, run): every ad shown to the group's personas.
std::vector<textvec::Document> GroupDocuments(
    std::span<const ecosim::AdRecord> ads,
    const std::map<std::string, std::string>& persona_group);

struct H1Result {
  std::vector<std::string> groups;
  // mean_similarity[i][j]: mean of D(g_i, g_j).
  std::vector<std::vector<double>> mean_similarity;
  // tests[i][j]: Welch test of D(g_i, g_i) against D(g_i, g_j), i != j.
  // Unset when a distribution is too small to test.
  std::vector<std::vector<std::optional<stats::TestResult>>> tests;
};

// Pairwise cosine similarity of per-(group, run) documents. Within-group
// distributions use distinct runs; across-group ones use every run pair.
absl::StatusOr<H1Result> H1SimilarityMatrix(
    std::span<const textvec::Document> documents);

}  // namespace adtomo::tomography

#endif  // ADTOMO_TOMOGRAPHY_H_
