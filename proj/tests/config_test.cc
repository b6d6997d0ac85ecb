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

#include "adtomo/config.h"

#include "adtomo/profiles.h"
#include "gtest/gtest.h"

namespace adtomo {
namespace {

using nlohmann::json;

json SmallJson() {
  auto config = Profile("small");
  EXPECT_TRUE(config.ok());
  return json::parse(PipelineConfigToJson(*config).dump());
}

void ExpectError(const json& j, const std::string& needle) {
  auto r = ParsePipelineConfig(j);
  ASSERT_FALSE(r.ok()) << "expected failure mentioning " << needle;
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_NE(std::string(r.status().message()).find(needle), std::string::npos)
      << r.status();
}

TEST(ConfigTest, ProfilesValidateAndRoundTrip) {
  for (const std::string& name : ProfileNames()) {
    auto config = Profile(name);
    ASSERT_TRUE(config.ok()) << name;
    EXPECT_TRUE(ValidatePipelineConfig(*config).ok()) << name;
    const std::string text = PipelineConfigToJson(*config).dump();
    auto parsed = ParsePipelineConfigText(text);
    ASSERT_TRUE(parsed.ok()) << name << ": " << parsed.status();
    EXPECT_EQ(PipelineConfigToJson(*parsed).dump(), text) << name;
  }
  EXPECT_FALSE(Profile("huge").ok());
}

TEST(ConfigTest, FoldsMustDivideCrossValidationRuns) {
  json j = SmallJson();
  j["folds"] = 3;  // runs 10, holdout 2: 8 cross-validation runs
  ExpectError(j, "folds");
}

TEST(ConfigTest, HoldoutMustLeaveRuns) {
  json j = SmallJson();
  j["holdout_runs"] = 10;
  ExpectError(j, "holdout_runs");
}

TEST(ConfigTest, FieldPaths) {
  json j = SmallJson();
  j["world"]["edges"][1]["reliability"] = "high";
  ExpectError(j, "world.edges[1].reliability");

  j = SmallJson();
  j["world"]["trackers"][0].erase("id");
  ExpectError(j, "world.trackers[0].id");

  j = SmallJson();
  j["grid"]["max_depth"] = json::array({3, 0});
  ExpectError(j, "grid.max_depth[1]");

  j = SmallJson();
  j["grid"]["features_per_split"] = json::array({"log2"});
  ExpectError(j, "grid.features_per_split[0]");

  j = SmallJson();
  j["stats"]["alpha"] = 1.5;
  ExpectError(j, "stats.alpha");

  j = SmallJson();
  j["world"]["slots"][0]["mechanism"] = "vickrey";
  ExpectError(j, "world.slots[0].mechanism");
}

TEST(ConfigTest, UnknownFieldsAreRejected) {
  json j = SmallJson();
  j["fold"] = 4;
  ExpectError(j, "fold: unknown field");
  j = SmallJson();
  j["run"]["persona_plan"]["extra"] = 1;
  ExpectError(j, "run.persona_plan.extra");
}

TEST(ConfigTest, SeedHandling) {
  json j = SmallJson();
  j.erase("seed");
  j["run"]["seed"] = 9;
  auto r = ParsePipelineConfig(j);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->seed, 9u);

  j = SmallJson();
  j["run"].erase("seed");
  j["seed"] = 4;
  r = ParsePipelineConfig(j);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->sim.run.seed, 4u);

  j = SmallJson();
  j["seed"] = 4;
  j["run"]["seed"] = 5;
  ExpectError(j, "seed");

  PipelineConfig c = *r;
  SetSeed(c, 77);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.sim.run.seed, 77u);
}

TEST(ConfigTest, NullMaxDepthMeansUnbounded) {
  json j = SmallJson();
  j["grid"]["max_depth"] = json::array({nullptr, 4});
  auto r = ParsePipelineConfig(j);
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r->grid.max_depth.size(), 2u);
  EXPECT_FALSE(r->grid.max_depth[0].has_value());
  EXPECT_EQ(r->grid.max_depth[1], 4);
}

TEST(ConfigTest, InvalidJsonText) {
  auto r = ParsePipelineConfigText("{\"world\": ");
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(LoadPipelineConfig("/nonexistent/config.json").status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace adtomo
