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

#include "adtomo/rng.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"

namespace adtomo {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, UniformInUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RngTest, UniformIndexCoversRange) {
  Rng rng(3);
  std::set<size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const size_t k = rng.UniformIndex(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(RngTest, NormalMoments) {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Normal(2.0, 3.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  // Five standard errors.
  EXPECT_NEAR(mean, 2.0, 5 * 3.0 / std::sqrt(n));
  EXPECT_NEAR(var, 9.0, 5 * 9.0 * std::sqrt(2.0 / n));
}

TEST(RngTest, BernoulliAndNormalDrawCounts) {
  Rng a(9), b(9);
  a.Bernoulli(0.0);
  b.NextU64();
  EXPECT_EQ(a.NextU64(), b.NextU64());
  a.Normal(0.0, 1.0);
  b.NextU64();
  b.NextU64();
  EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(DeriveSeedTest, DistinctCoordinatesGiveDistinctSeeds) {
  std::set<uint64_t> seeds;
  for (uint64_t run = 0; run < 20; ++run) {
    for (uint64_t p = 0; p < 20; ++p) {
      seeds.insert(DeriveSeed(1, "simulate", {run, p}));
    }
  }
  EXPECT_EQ(seeds.size(), 400u);
  EXPECT_NE(DeriveSeed(1, "simulate"), DeriveSeed(1, "segment"));
  EXPECT_NE(DeriveSeed(1, "x", {1, 2}), DeriveSeed(1, "x", {2, 1}));
  EXPECT_NE(DeriveSeed(1, "x"), DeriveSeed(2, "x"));
  EXPECT_EQ(DeriveSeed(7, "x", {3}), DeriveSeed(7, "x", {3}));
}

TEST(HashStringTest, StableAndSensitive) {
  EXPECT_EQ(HashString("persona"), HashString("persona"));
  EXPECT_NE(HashString("p01"), HashString("p10"));
  EXPECT_NE(HashString(""), HashString("a"));
}

}  // namespace
}  // namespace adtomo
