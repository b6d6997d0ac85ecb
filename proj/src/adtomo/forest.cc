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

#include "adtomo/forest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "adtomo/status_macros.h"

namespace adtomo::forest {
namespace {

constexpr double kGainEpsilon = 1e-12;

double EntropyBits(double pos, double neg) {
  const double n = pos + neg;
  double h = 0.0;
  if (pos > 0) h -= (pos / n) * std::log2(pos / n);
  if (neg > 0) h -= (neg / n) * std::log2(neg / n);
  return h;
}

// Distinct (features, label) pairs; trees are grown on row weights.
struct Rows {
  std::vector<const std::vector<uint8_t>*> features;
  std::vector<bool> labels;
  size_t num_features = 0;
};

bool SampleLess(const Sample& a, const Sample& b) {
  return std::tie(a.features, a.label, a.persona) <
         std::tie(b.features, b.label, b.persona);
}

// `order` lists sample indices in canonical order. Fills `row_of` with the
// row of each sample.
Rows BuildRows(std::span<const Sample> samples, std::span<const size_t> order,
               std::vector<size_t>& row_of) {
  Rows rows;
  rows.num_features = samples.empty() ? 0 : samples[0].features.size();
  row_of.assign(samples.size(), 0);
  for (size_t i : order) {
    const Sample& s = samples[i];
    if (rows.features.empty() || *rows.features.back() != s.features ||
        rows.labels.back() != s.label) {
      rows.features.push_back(&s.features);
      rows.labels.push_back(s.label);
    }
    row_of[i] = rows.features.size() - 1;
  }
  return rows;
}

std::vector<size_t> CanonicalOrder(std::span<const Sample> samples) {
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return SampleLess(samples[a], samples[b]);
  });
  return order;
}

absl::Status CheckSamples(std::span<const Sample> samples) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("training needs at least one sample");
  }
  const size_t f = samples[0].features.size();
  for (size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].features.size() != f) {
      return absl::InvalidArgumentError(absl::StrCat(
          "sample ", i, " has ", samples[i].features.size(),
          " features, expected ", f));
    }
  }
  return absl::OkStatus();
}

class TreeBuilder {
 public:
  TreeBuilder(const Rows& rows, const std::vector<double>& weights,
              const ForestParams& params, Rng& rng)
      : rows_(rows), weights_(weights), params_(params), rng_(rng) {}

  DecisionTree Build() {
    std::vector<uint32_t> active;
    for (size_t r = 0; r < weights_.size(); ++r) {
      if (weights_[r] > 0) active.push_back(static_cast<uint32_t>(r));
    }
    Grow(active, 0);
    return std::move(tree_);
  }

 private:
  std::vector<size_t> CandidateFeatures() {
    const size_t f = rows_.num_features;
    std::vector<size_t> all(f);
    std::iota(all.begin(), all.end(), size_t{0});
    if (params_.features_per_split == FeaturesPerSplit::kAll || f == 0) {
      return all;
    }
    const size_t m = std::max<size_t>(
        1, static_cast<size_t>(std::floor(std::sqrt(static_cast<double>(f)))));
    // Partial Fisher-Yates.
    for (size_t i = 0; i < m; ++i) {
      const size_t j = i + rng_.UniformIndex(f - i);
      std::swap(all[i], all[j]);
    }
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
  }

  int Grow(const std::vector<uint32_t>& active, int depth) {
    double pos = 0, neg = 0;
    for (uint32_t r : active) (rows_.labels[r] ? pos : neg) += weights_[r];
    const int index = static_cast<int>(tree_.nodes.size());
    TreeNode node;
    node.count = pos + neg;
    node.label = pos > neg;
    tree_.nodes.push_back(node);

    const bool at_depth_limit =
        params_.max_depth.has_value() && depth >= *params_.max_depth;
    if (pos == 0 || neg == 0 || at_depth_limit ||
        node.count < 2.0 * params_.min_leaf) {
      return index;
    }

    const double parent_h = EntropyBits(pos, neg);
    int best_feature = -1;
    double best_gain = kGainEpsilon;
    for (size_t f : CandidateFeatures()) {
      double p0 = 0, n0 = 0, p1 = 0, n1 = 0;
      for (uint32_t r : active) {
        const bool on = (*rows_.features[r])[f] != 0;
        const double w = weights_[r];
        if (rows_.labels[r]) {
          (on ? p1 : p0) += w;
        } else {
          (on ? n1 : n0) += w;
        }
      }
      const double w0 = p0 + n0, w1 = p1 + n1;
      if (w0 < params_.min_leaf || w1 < params_.min_leaf) continue;
      if (w0 == 0 || w1 == 0) continue;
      const double gain = parent_h - (w0 / node.count) * EntropyBits(p0, n0) -
                          (w1 / node.count) * EntropyBits(p1, n1);
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
      }
    }
    if (best_feature < 0) return index;

    std::vector<uint32_t> absent, present;
    for (uint32_t r : active) {
      ((*rows_.features[r])[best_feature] ? present : absent).push_back(r);
    }
    const int absent_child = Grow(absent, depth + 1);
    const int present_child = Grow(present, depth + 1);
    const TreeNode& a = tree_.nodes[absent_child];
    const TreeNode& p = tree_.nodes[present_child];
    if (params_.collapse_redundant_splits && a.is_leaf() && p.is_leaf() &&
        a.label == p.label) {
      // Both children are the last two nodes appended.
      tree_.nodes.resize(index + 1);
      return index;
    }
    TreeNode& self = tree_.nodes[index];
    self.feature = best_feature;
    self.gain = best_gain;
    self.absent = absent_child;
    self.present = present_child;
    return index;
  }

  const Rows& rows_;
  const std::vector<double>& weights_;
  const ForestParams& params_;
  Rng& rng_;
  DecisionTree tree_;
};

}  // namespace

bool ParamsLess(const ForestParams& a, const ForestParams& b) {
  auto key = [](const ForestParams& p) {
    return std::make_tuple(p.n_trees, p.max_depth.has_value() ? 0 : 1,
                           p.max_depth.value_or(0),
                           p.features_per_split == FeaturesPerSplit::kSqrt ? 0 : 1,
                           p.min_leaf);
  };
  return key(a) < key(b);
}

std::string ParamsToString(const ForestParams& p) {
  return absl::StrCat(
      "n_trees=", p.n_trees, " max_depth=",
      p.max_depth ? std::to_string(*p.max_depth) : std::string("unbounded"),
      " features_per_split=",
      p.features_per_split == FeaturesPerSplit::kSqrt ? "sqrt" : "all",
      " min_leaf=", p.min_leaf);
}

absl::Status ValidateParams(const ForestParams& p) {
  if (p.n_trees < 1) {
    return absl::InvalidArgumentError("n_trees: must be >= 1");
  }
  if (p.max_depth.has_value() && *p.max_depth < 0) {
    return absl::InvalidArgumentError("max_depth: must be >= 0");
  }
  if (p.min_leaf < 1) {
    return absl::InvalidArgumentError("min_leaf: must be >= 1");
  }
  return absl::OkStatus();
}

HyperGrid HyperGrid::Default() {
  return {{50, 100, 200},
          {3, 5, std::nullopt},
          {FeaturesPerSplit::kSqrt, FeaturesPerSplit::kAll},
          {1, 2}};
}

absl::Status HyperGrid::Validate() const {
  if (n_trees.empty()) return absl::InvalidArgumentError("grid.n_trees: empty");
  if (max_depth.empty()) {
    return absl::InvalidArgumentError("grid.max_depth: empty");
  }
  if (features_per_split.empty()) {
    return absl::InvalidArgumentError("grid.features_per_split: empty");
  }
  if (min_leaf.empty()) return absl::InvalidArgumentError("grid.min_leaf: empty");
  for (const ForestParams& p : Points()) {
    if (absl::Status s = ValidateParams(p); !s.ok()) {
      return absl::InvalidArgumentError(absl::StrCat("grid.", s.message()));
    }
  }
  return absl::OkStatus();
}

std::vector<ForestParams> HyperGrid::Points() const {
  std::vector<ForestParams> points;
  for (int n : n_trees) {
    for (const auto& d : max_depth) {
      for (FeaturesPerSplit f : features_per_split) {
        for (int m : min_leaf) {
          ForestParams p;
          p.n_trees = n;
          p.max_depth = d;
          p.features_per_split = f;
          p.min_leaf = m;
          points.push_back(p);
        }
      }
    }
  }
  std::stable_sort(points.begin(), points.end(), ParamsLess);
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

bool DecisionTree::Predict(std::span<const uint8_t> features) const {
  int i = 0;
  while (!nodes[i].is_leaf()) {
    i = features[nodes[i].feature] ? nodes[i].present : nodes[i].absent;
  }
  return nodes[i].label;
}

int DecisionTree::Depth() const {
  // Children always follow their parent in depth-first order.
  std::vector<int> depth(nodes.size(), 0);
  int max_depth = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    depth[nodes[i].absent] = depth[nodes[i].present] = depth[i] + 1;
    max_depth = std::max(max_depth, depth[i] + 1);
  }
  return max_depth;
}

absl::StatusOr<double> Entropy(double positives, double negatives) {
  if (positives < 0 || negatives < 0 || positives + negatives <= 0) {
    return absl::InvalidArgumentError("entropy of an empty label multiset");
  }
  return EntropyBits(positives, negatives);
}

absl::StatusOr<DecisionTree> TrainTree(std::span<const Sample> samples,
                                       const ForestParams& params, Rng& rng) {
  RETURN_IF_ERROR(CheckSamples(samples));
  RETURN_IF_ERROR(ValidateParams(params));
  std::vector<size_t> row_of;
  const std::vector<size_t> order = CanonicalOrder(samples);
  const Rows rows = BuildRows(samples, order, row_of);
  std::vector<double> weights(rows.features.size(), 0.0);
  for (size_t i = 0; i < samples.size(); ++i) weights[row_of[i]] += 1.0;
  return TreeBuilder(rows, weights, params, rng).Build();
}

absl::StatusOr<ForestModel> TrainForest(std::span<const Sample> samples,
                                        const ForestParams& params,
                                        uint64_t seed) {
  RETURN_IF_ERROR(CheckSamples(samples));
  RETURN_IF_ERROR(ValidateParams(params));
  const std::vector<size_t> order = CanonicalOrder(samples);
  std::vector<size_t> row_of;
  const Rows rows = BuildRows(samples, order, row_of);

  ForestModel model;
  model.params = params;
  model.seed = seed;
  model.num_features = rows.num_features;
  model.trees.reserve(params.n_trees);
  std::vector<double> weights(rows.features.size());
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(DeriveSeed(seed, "tree", {static_cast<uint64_t>(t)}));
    std::fill(weights.begin(), weights.end(), 0.0);
    for (size_t i = 0; i < order.size(); ++i) {
      weights[row_of[order[rng.UniformIndex(order.size())]]] += 1.0;
    }
    model.trees.push_back(TreeBuilder(rows, weights, params, rng).Build());
  }
  return model;
}

absl::StatusOr<bool> Predict(const ForestModel& model,
                             std::span<const uint8_t> features) {
  if (features.size() != model.num_features) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", model.num_features, " features, got ",
                     features.size()));
  }
  size_t votes = 0;
  for (const auto& tree : model.trees) votes += tree.Predict(features) ? 1 : 0;
  return 2 * votes > model.trees.size();
}

absl::StatusOr<double> Accuracy(const ForestModel& model,
                                std::span<const Sample> samples) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("accuracy over an empty sample set");
  }
  size_t correct = 0;
  for (const auto& s : samples) {
    ASSIGN_OR_RETURN(bool predicted, Predict(model, s.features));
    if (predicted == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

absl::StatusOr<std::vector<std::vector<size_t>>> StratifiedFolds(
    std::span<const Sample> samples, int folds, uint64_t seed) {
  if (folds < 2) return absl::InvalidArgumentError("folds: must be >= 2");
  std::map<std::string, std::vector<size_t>> by_persona;
  for (size_t i = 0; i < samples.size(); ++i) {
    by_persona[samples[i].persona].push_back(i);
  }
  std::vector<std::vector<size_t>> out(folds);
  for (auto& [persona, indices] : by_persona) {
    if (indices.size() % static_cast<size_t>(folds) != 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "folds: persona '", persona, "' has ", indices.size(),
          " records, not divisible by ", folds, " folds"));
    }
    Rng rng(DeriveSeed(seed, "folds", {HashString(persona)}));
    for (size_t i = indices.size(); i > 1; --i) {
      std::swap(indices[i - 1], indices[rng.UniformIndex(i)]);
    }
    for (size_t i = 0; i < indices.size(); ++i) {
      out[i % folds].push_back(indices[i]);
    }
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

absl::StatusOr<CvResult> CrossValidateGrid(std::span<const Sample> samples,
                                           const HyperGrid& grid, int folds,
                                           uint64_t seed) {
  RETURN_IF_ERROR(CheckSamples(samples));
  RETURN_IF_ERROR(grid.Validate());
  ASSIGN_OR_RETURN(auto fold_index, StratifiedFolds(samples, folds, seed));

  std::vector<std::vector<Sample>> train(folds), test(folds);
  std::vector<int> fold_of(samples.size());
  for (int f = 0; f < folds; ++f) {
    for (size_t i : fold_index[f]) fold_of[i] = f;
  }
  for (int f = 0; f < folds; ++f) {
    for (size_t i = 0; i < samples.size(); ++i) {
      (fold_of[i] == f ? test[f] : train[f]).push_back(samples[i]);
    }
  }

  const std::vector<ForestParams> points = grid.Points();
  CvResult result;
  result.accuracy = -1.0;
  for (size_t g = 0; g < points.size(); ++g) {
    double sum = 0.0;
    for (int f = 0; f < folds; ++f) {
      if (train[f].empty() || test[f].empty()) {
        return absl::InvalidArgumentError(
            "folds: every fold needs training and test samples");
      }
      ASSIGN_OR_RETURN(
          ForestModel model,
          TrainForest(train[f], points[g],
                      DeriveSeed(seed, "cv", {g, static_cast<uint64_t>(f)})));
      ASSIGN_OR_RETURN(double acc, Accuracy(model, test[f]));
      sum += acc;
    }
    const double mean = sum / folds;
    result.grid_accuracy.push_back(mean);
    if (mean > result.accuracy + 1e-12) {
      result.accuracy = mean;
      result.best = points[g];
    }
  }
  return result;
}

FeatureImportance ComputeFeatureImportance(const ForestModel& model) {
  FeatureImportance imp;
  imp.gains.assign(model.num_features, 0.0);
  for (const auto& tree : model.trees) {
    const double root = tree.nodes[0].count;
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      imp.gains[node.feature] += node.count / root * node.gain;
    }
  }
  if (!model.trees.empty()) {
    for (double& g : imp.gains) g /= static_cast<double>(model.trees.size());
  }
  const double total = std::accumulate(imp.gains.begin(), imp.gains.end(), 0.0);
  if (total > 0) {
    for (double& g : imp.gains) g /= total;
  }
  return imp;
}

}  // namespace adtomo::forest
