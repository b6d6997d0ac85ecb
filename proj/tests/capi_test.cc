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

#include "adtomo/adtomo.h"

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"

namespace {

namespace oracle = adtomo::oracle;

std::string Take(char* s) {
  std::string copy(s);
  adtomo_string_free(s);
  return copy;
}

TEST(CApiTest, VersionIsSet) {
  EXPECT_STRNE(adtomo_version(), "");
}

TEST(CApiTest, ProfileNamesListEveryProfile) {
  char* names = nullptr;
  ASSERT_EQ(adtomo_profile_names(&names), ADTOMO_OK);
  const std::string list = Take(names);
  for (const char* name : {"desk", "h1", "single-edge", "small", "small-empty"}) {
    EXPECT_NE(list.find(name), std::string::npos) << name;
  }
}

TEST(CApiTest, UnknownProfileIsInvalid) {
  adtomo_pipeline* p = nullptr;
  EXPECT_EQ(adtomo_pipeline_open_profile("nope", &p), ADTOMO_ERROR_INVALID);
  EXPECT_EQ(p, nullptr);
  EXPECT_NE(std::string(adtomo_last_error()).find("nope"), std::string::npos);
}

TEST(CApiTest, MissingConfigFileIsIoError) {
  adtomo_pipeline* p = nullptr;
  EXPECT_EQ(adtomo_pipeline_open_file("/nonexistent/config.json", &p),
            ADTOMO_ERROR_IO);
  EXPECT_EQ(p, nullptr);
}

TEST(CApiTest, MalformedJsonIsInvalid) {
  adtomo_pipeline* p = nullptr;
  EXPECT_EQ(adtomo_pipeline_open_json("{", &p), ADTOMO_ERROR_INVALID);
  EXPECT_EQ(adtomo_pipeline_open_json(nullptr, &p), ADTOMO_ERROR_INVALID);
}

TEST(CApiTest, ConfigRoundTripsThroughJson) {
  char* text = nullptr;
  ASSERT_EQ(adtomo_profile_json("small", &text), ADTOMO_OK);
  const std::string json = Take(text);
  adtomo_pipeline* p = nullptr;
  ASSERT_EQ(adtomo_pipeline_open_json(json.c_str(), &p), ADTOMO_OK)
      << adtomo_last_error();
  ASSERT_EQ(adtomo_pipeline_set_seed(p, 42), ADTOMO_OK);
  char* resolved = nullptr;
  ASSERT_EQ(adtomo_pipeline_config_json(p, &resolved), ADTOMO_OK);
  const std::string out = Take(resolved);
  EXPECT_NE(out.find("\"seed\": 42"), std::string::npos);
  adtomo_pipeline_close(p);
}

TEST(CApiTest, NullHandlesAreInvalid) {
  EXPECT_EQ(adtomo_pipeline_run(nullptr), ADTOMO_ERROR_INVALID);
  EXPECT_EQ(adtomo_pipeline_set_output_dir(nullptr, "x"), ADTOMO_ERROR_INVALID);
  adtomo_pipeline_close(nullptr);
}

TEST(CApiTest, StageWithoutInputsIsIoError) {
  adtomo_pipeline* p = nullptr;
  ASSERT_EQ(adtomo_pipeline_open_profile("small", &p), ADTOMO_OK);
  ASSERT_EQ(adtomo_pipeline_set_input_dir(p, "/nonexistent/adtomo"),
            ADTOMO_OK);
  EXPECT_EQ(adtomo_pipeline_flag(p), ADTOMO_ERROR_IO);
  EXPECT_STRNE(adtomo_last_error(), "");
  adtomo_pipeline_close(p);
}

TEST(CApiTest, ChiSquareMatchesOracle) {
  const double a[] = {50, 10, 30}, b[] = {10, 50, 25};
  adtomo_test_result r;
  ASSERT_EQ(adtomo_chi_square(a, b, 3, 5.0, &r), ADTOMO_OK);
  const double stat =
      oracle::ChiSquareStatistic({50, 10, 30}, {10, 50, 25});
  EXPECT_NEAR(r.statistic, stat, 1e-9);
  EXPECT_EQ(r.df, 2.0);
  EXPECT_NEAR(r.p_value, oracle::ChiSquareSurvival(stat, 2), 1e-9);
  EXPECT_EQ(adtomo_chi_square(a, b, 3, -1.0, &r), ADTOMO_ERROR_INVALID);
}

TEST(CApiTest, WelchMatchesOracle) {
  const std::vector<double> x = {1.0, 2.5, 3.0, 4.5}, y = {2.0, 4.0, 6.5};
  adtomo_test_result r;
  ASSERT_EQ(adtomo_welch_t(x.data(), x.size(), y.data(), y.size(), &r),
            ADTOMO_OK);
  const oracle::Welch w = oracle::WelchStatistic(x, y);
  EXPECT_NEAR(r.statistic, w.t, 1e-9);
  EXPECT_NEAR(r.df, w.df, 1e-9);
  EXPECT_NEAR(r.p_value, oracle::StudentTwoSided(w.t, w.df), 1e-9);
  EXPECT_EQ(adtomo_welch_t(x.data(), 1, y.data(), y.size(), &r),
            ADTOMO_ERROR_INVALID);
}

}  // namespace
