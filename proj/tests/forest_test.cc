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
#include <numeric>
#include <random>
#include <set>

#include "gtest/gtest.h"

namespace adtomo::forest {
namespace {

double H(double p, double n) {
  double h = 0;
  for (double c : {p, n}) {
    if (c > 0) h -= c / (p + n) * std::log2(c / (p + n));
  }
  return h;
}

Sample S(std::vector<uint8_t> f, bool label, std::string persona = "p") {
  return {std::move(f), label, std::move(persona)};
}

// Five random binary features; the label copies feature 2.
std::vector<Sample> Separable(int n, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) {
    std::vector<uint8_t> f(5);
    for (auto& b : f) b = gen() & 1;
    out.push_back(S(f, f[2] != 0, "p" + std::to_string(i % 8)));
  }
  return out;
}

TEST(EntropyTest, Values) {
  EXPECT_DOUBLE_EQ(*Entropy(4, 4), 1.0);
  EXPECT_DOUBLE_EQ(*Entropy(5, 0), 0.0);
  EXPECT_NEAR(*Entropy(1, 3), H(1, 3), 1e-15);
  EXPECT_FALSE(Entropy(0, 0).ok());
}

TEST(TrainTreeTest, GainBookkeepingByHand) {
  // f0 = 1 for three positives and one negative; f0 = 0 for four negatives.
  std::vector<Sample> data;
  for (int i = 0; i < 3; ++i) data.push_back(S({1, 0}, true));
  data.push_back(S({1, 1}, false));
  for (int i = 0; i < 4; ++i) data.push_back(S({0, i % 2 == 0}, false));
  ForestParams params;
  params.max_depth = 1;
  params.collapse_redundant_splits = false;
  Rng rng(1);
  auto tree = TrainTree(data, params, rng);
  ASSERT_TRUE(tree.ok());
  const TreeNode& root = tree->nodes[0];
  ASSERT_EQ(root.feature, 0);
  EXPECT_EQ(root.count, 8.0);
  EXPECT_NEAR(root.gain, H(3, 5) - 0.5 * H(3, 1), 1e-15);
  EXPECT_EQ(tree->nodes[root.present].count, 4.0);
  EXPECT_TRUE(tree->nodes[root.present].label);
  EXPECT_FALSE(tree->nodes[root.absent].label);
}

TEST(TrainTreeTest, ImportanceByHand) {
  // Depth-2 tree: root on f0, then f1 inside the f0 = 1 branch.
  std::vector<Sample> data;
  for (int i = 0; i < 4; ++i) data.push_back(S({0, i % 2 == 0}, false));
  for (int i = 0; i < 2; ++i) data.push_back(S({1, 1}, true));
  for (int i = 0; i < 2; ++i) data.push_back(S({1, 0}, false));
  ForestParams params;
  Rng rng(1);
  auto tree = TrainTree(data, params, rng);
  ASSERT_TRUE(tree.ok());
  ASSERT_EQ(tree->Depth(), 2);
  const double g0 = H(2, 6) - 0.5 * H(2, 2);
  const double g1 = 1.0;
  ForestModel model;
  model.trees = {*tree};
  model.num_features = 2;
  FeatureImportance imp = ComputeFeatureImportance(model);
  const double w0 = g0, w1 = 0.5 * g1;
  EXPECT_NEAR(imp.gains[0], w0 / (w0 + w1), 1e-15);
  EXPECT_NEAR(imp.gains[1], w1 / (w0 + w1), 1e-15);
}

TEST(TrainTreeTest, RedundantSplitsCollapse) {
  // f0 splits 6:0 negatives from 3:1; both sides are majority negative.
  std::vector<Sample> data;
  for (int i = 0; i < 6; ++i) data.push_back(S({0}, false));
  for (int i = 0; i < 3; ++i) data.push_back(S({1}, false));
  data.push_back(S({1}, true));
  ForestParams params;
  params.max_depth = 1;
  Rng rng(1);
  auto collapsed = TrainTree(data, params, rng);
  EXPECT_EQ(collapsed->nodes.size(), 1u);
  params.collapse_redundant_splits = false;
  auto kept = TrainTree(data, params, rng);
  EXPECT_EQ(kept->nodes.size(), 3u);
}

TEST(ForestTest, DeterministicRetraining) {
  std::vector<Sample> data = Separable(200, 3);
  ForestParams params;
  params.n_trees = 20;
  params.features_per_split = FeaturesPerSplit::kSqrt;
  auto a = TrainForest(data, params, 5);
  std::vector<Sample> shuffled = data;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(1));
  auto b = TrainForest(shuffled, params, 5);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->trees, b->trees);
  auto c = TrainForest(data, params, 6);
  EXPECT_NE(a->trees, c->trees);
}

TEST(ForestTest, SeparableDataHoldoutIsPerfect) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<Sample> train = Separable(160, seed);
    std::vector<Sample> test = Separable(80, seed + 1000);
    ForestParams params;
    params.n_trees = 30;
    auto model = TrainForest(train, params, seed);
    ASSERT_TRUE(model.ok());
    EXPECT_EQ(*Accuracy(*model, test), 1.0) << seed;
    FeatureImportance imp = ComputeFeatureImportance(*model);
    EXPECT_NEAR(std::accumulate(imp.gains.begin(), imp.gains.end(), 0.0), 1.0,
                1e-9);
    EXPECT_EQ(std::max_element(imp.gains.begin(), imp.gains.end()) -
                  imp.gains.begin(),
              2);
  }
}

std::vector<Sample> Xor(int copies) {
  std::vector<Sample> out;
  for (int c = 0; c < copies; ++c) {
    for (uint8_t a : {0, 1}) {
      for (uint8_t b : {0, 1}) out.push_back(S({a, b}, a != b));
    }
  }
  return out;
}

TEST(ForestTest, XorNeedsDepthTwo) {
  std::vector<Sample> data = Xor(25);
  ForestParams params;
  params.n_trees = 25;
  params.max_depth = 2;
  auto deep = TrainForest(data, params, 1);
  ASSERT_TRUE(deep.ok());
  EXPECT_EQ(*Accuracy(*deep, data), 1.0);
  params.max_depth = 1;
  auto stump = TrainForest(data, params, 1);
  EXPECT_LE(*Accuracy(*stump, data), 0.75);
}

TEST(ForestTest, NoSplitsGiveZeroImportance) {
  std::vector<Sample> data;
  for (int i = 0; i < 10; ++i) data.push_back(S({uint8_t(i % 2), 0}, false));
  auto model = TrainForest(data, ForestParams{}, 1);
  FeatureImportance imp = ComputeFeatureImportance(*model);
  EXPECT_EQ(imp.gains, (std::vector<double>{0.0, 0.0}));
  EXPECT_FALSE(*Predict(*model, std::vector<uint8_t>{1, 1}));
}

TEST(ForestTest, RejectsBadInput) {
  std::vector<Sample> ragged = {S({0, 1}, true), S({0}, false)};
  EXPECT_FALSE(TrainForest(ragged, ForestParams{}, 1).ok());
  EXPECT_FALSE(TrainForest(std::vector<Sample>{}, ForestParams{}, 1).ok());
  ForestParams bad;
  bad.min_leaf = 0;
  EXPECT_FALSE(TrainForest(Xor(1), bad, 1).ok());
}

TEST(FoldsTest, StratifiedByPersona) {
  std::vector<Sample> data;
  for (int p = 0; p < 5; ++p) {
    for (int r = 0; r < 8; ++r) {
      data.push_back(S({uint8_t(r % 2)}, r % 3 == 0, "p" + std::to_string(p)));
    }
  }
  auto folds = StratifiedFolds(data, 4, 9);
  ASSERT_TRUE(folds.ok());
  std::multiset<size_t> all;
  for (const auto& fold : *folds) {
    std::map<std::string, int> per;
    for (size_t i : fold) {
      ++per[data[i].persona];
      all.insert(i);
    }
    for (const auto& [p, n] : per) EXPECT_EQ(n, 2);
  }
  EXPECT_EQ(all.size(), data.size());
  EXPECT_EQ(std::set<size_t>(all.begin(), all.end()).size(), data.size());
  EXPECT_FALSE(StratifiedFolds(data, 3, 9).ok());
}

TEST(GridTest, DefaultOrder) {
  std::vector<ForestParams> points = HyperGrid::Default().Points();
  ASSERT_EQ(points.size(), 36u);
  EXPECT_EQ(points[0].n_trees, 50);
  EXPECT_EQ(points[0].max_depth, 3);
  EXPECT_EQ(points[0].features_per_split, FeaturesPerSplit::kSqrt);
  EXPECT_EQ(points[0].min_leaf, 1);
  EXPECT_FALSE(points[11].max_depth.has_value());
  EXPECT_TRUE(std::is_sorted(points.begin(), points.end(), ParamsLess));
}

TEST(GridTest, CrossValidationPicksFirstBest) {
  std::vector<Sample> data = Separable(64, 4);
  HyperGrid grid;
  grid.n_trees = {5, 10};
  grid.max_depth = {1, std::nullopt};
  grid.features_per_split = {FeaturesPerSplit::kAll};
  grid.min_leaf = {1};
  auto cv = CrossValidateGrid(data, grid, 4, 2);
  ASSERT_TRUE(cv.ok()) << cv.status();
  ASSERT_EQ(cv->grid_accuracy.size(), 4u);
  // Every point separates perfectly, so the first one wins.
  EXPECT_EQ(cv->accuracy, 1.0);
  EXPECT_EQ(cv->best, grid.Points()[0]);
}

}  // namespace
}  // namespace adtomo::forest
