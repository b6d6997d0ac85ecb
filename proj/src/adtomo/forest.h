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

// Random forest over binary feature vectors, grown with entropy-based
// information gain so that per-feature gains can be read back out of the
// trained model.

#ifndef ADTOMO_FOREST_H_
#define ADTOMO_FOREST_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "adtomo/rng.h"

namespace adtomo::forest {

struct Sample {
  std::vector<uint8_t> features;  // 0/1 flags
  bool label = false;
  std::string persona;  // stratification key
};

enum class FeaturesPerSplit { kSqrt, kAll };

struct ForestParams {
  int n_trees = 100;
  std::optional<int> max_depth;  // nullopt: unbounded
  FeaturesPerSplit features_per_split = FeaturesPerSplit::kAll;
  int min_leaf = 1;
  // Drop splits whose two subtrees predict the same label everywhere. Such
  // splits never change a prediction, so they carry no importance.
  bool collapse_redundant_splits = true;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

// Lexicographic order over (n_trees, max_depth, features_per_split, min_leaf)
// with unbounded depth last and sqrt before all.
bool ParamsLess(const ForestParams& a, const ForestParams& b);
std::string ParamsToString(const ForestParams& p);
absl::Status ValidateParams(const ForestParams& p);

struct HyperGrid {
  std::vector<int> n_trees;
  std::vector<std::optional<int>> max_depth;
  std::vector<FeaturesPerSplit> features_per_split;
  std::vector<int> min_leaf;

  // n_trees {50,100,200}; max_depth {3,5,unbounded}; {sqrt,all}; min_leaf {1,2}.
  static HyperGrid Default();
  absl::Status Validate() const;
  // Cartesian product in ParamsLess order.
  std::vector<ForestParams> Points() const;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  int absent = -1;   // child for feature == 0
  int present = -1;  // child for feature == 1
  bool label = false;
  double count = 0.0;  // training samples reaching the node
  double gain = 0.0;   // information gain of the split, in bits

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Nodes in depth-first order; nodes[0] is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  bool Predict(std::span<const uint8_t> features) const;
  int Depth() const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestParams params;
  uint64_t seed = 0;
  size_t num_features = 0;
};

struct FeatureImportance {
  // Sums to 1, or all zero when no tree has a split.
  std::vector<double> gains;
};

// Shannon entropy in bits of a binary label multiset.
absl::StatusOr<double> Entropy(double positives, double negatives);

absl::StatusOr<DecisionTree> TrainTree(std::span<const Sample> samples,
                                       const ForestParams& params, Rng& rng);

// Each tree is grown on a same-size bootstrap resample drawn from its own
// substream. Samples are put in canonical order first, so the model depends
// only on the multiset of samples.
absl::StatusOr<ForestModel> TrainForest(std::span<const Sample> samples,
                                        const ForestParams& params,
                                        uint64_t seed);

// Majority vote; a tie votes false.
absl::StatusOr<bool> Predict(const ForestModel& model,
                             std::span<const uint8_t> features);

absl::StatusOr<double> Accuracy(const ForestModel& model,
                                std::span<const Sample> samples);

// Assigns sample indices to folds so every fold holds the same number of
// samples of each persona.
absl::StatusOr<std::vector<std::vector<size_t>>> StratifiedFolds(
    std::span<const Sample> samples, int folds, uint64_t seed);

struct CvResult {
  ForestParams best;
  double accuracy = 0.0;
  // Mean fold accuracy of every grid point, aligned with HyperGrid::Points().
  std::vector<double> grid_accuracy;
};

absl::StatusOr<CvResult> CrossValidateGrid(std::span<const Sample> samples,
                                           const HyperGrid& grid, int folds,
                                           uint64_t seed);

// Per feature: the sum over splitting nodes of (node share of the tree's
// samples) x (gain), averaged over trees and normalized to sum to 1.
FeatureImportance ComputeFeatureImportance(const ForestModel& model);

}  // namespace adtomo::forest

#endif  // ADTOMO_FOREST_H_
