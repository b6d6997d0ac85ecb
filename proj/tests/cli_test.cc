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

// Runs the adtomo binary end to end.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Result {
  int code = -1;
  std::string output;
};

Result Cli(const std::string& args) {
  const std::string cmd = std::string(ADTOMO_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void Spit(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::map<std::string, std::string> Artifacts(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    out[e.path().filename().string()] = Slurp(e.path());
  }
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("adtomo-cli-" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  fs::path dir_;
};

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
  Result r = Cli("bogus");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("Usage"), std::string::npos) << r.output;
}

TEST_F(CliTest, ConfigOrProfileIsRequired) {
  EXPECT_EQ(Cli("simulate").code, 2);
  EXPECT_EQ(Cli("simulate --profile small --config x.json").code, 2);
}

TEST_F(CliTest, UnknownProfileIsUsageError) {
  EXPECT_EQ(Cli("run --profile nope --out " + Path("o")).code, 2);
}

TEST_F(CliTest, ProfileListsNames) {
  Result r = Cli("profile");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("small-empty"), std::string::npos);
}

TEST_F(CliTest, FoldsMustDivideTrainingRuns) {
  ASSERT_EQ(Cli("profile small --out " + Path("small.json")).code, 0);
  json config = json::parse(Slurp(Path("small.json")));
  config["folds"] = 3;
  Spit(Path("bad.json"), config.dump());
  Result r = Cli("simulate --config " + Path("bad.json") + " --out " +
                 Path("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("folds"), std::string::npos) << r.output;
}

TEST_F(CliTest, MissingFilesAreIoErrors) {
  EXPECT_EQ(Cli("simulate --config " + Path("absent.json")).code, 3);
  EXPECT_EQ(Cli("flag --profile small --in " + Path("absent")).code, 3);
}

TEST_F(CliTest, InferRequiresFlaggedRecords) {
  const std::string common = " --profile small --out " + Path("o");
  ASSERT_EQ(Cli("simulate" + common).code, 0);
  ASSERT_EQ(Cli("flag" + common).code, 0);
  std::istringstream in(Slurp(Path("o/records.jsonl")));
  std::string stripped, line;
  while (std::getline(in, line)) {
    json record = json::parse(line);
    record.erase("is_different_from_control");
    stripped += record.dump() + "\n";
  }
  Spit(Path("o/records.jsonl"), stripped);
  Result r = Cli("infer" + common);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("flag stage required"), std::string::npos)
      << r.output;
}

TEST_F(CliTest, RunIsDeterministicAndMatchesStages) {
  ASSERT_EQ(Cli("run --profile small --seed 3 --out " + Path("a")).code, 0);
  ASSERT_EQ(Cli("run --profile small --seed 3 --out " + Path("b")).code, 0);
  const std::string common = " --profile small --seed 3 --out " + Path("c");
  for (const char* stage :
       {"simulate", "syncdetect", "flag", "infer", "evaluate"}) {
    ASSERT_EQ(Cli(stage + common).code, 0) << stage;
  }
  const auto a = Artifacts(dir_ / "a");
  EXPECT_EQ(a.size(), 11u);
  EXPECT_TRUE(a == Artifacts(dir_ / "b"));
  EXPECT_TRUE(a == Artifacts(dir_ / "c"));

  ASSERT_EQ(Cli("infer --profile small --seed 3 --in " + Path("a") +
                " --out " + Path("d"))
                .code,
            0);
  EXPECT_EQ(Slurp(dir_ / "d" / "report.json"), a.at("report.json"));
  EXPECT_EQ(Slurp(dir_ / "d" / "report.csv"), a.at("report.csv"));
}

TEST_F(CliTest, SingleEdgeIsRecovered) {
  ASSERT_EQ(Cli("run --profile single-edge --out " + Path("o")).code, 0);
  json eval = json::parse(Slurp(Path("o/evaluation.json")));
  EXPECT_EQ(eval["precision"], 1.0);
  EXPECT_EQ(eval["recall"], 1.0);
  ASSERT_EQ(eval["inferred_edges"].size(), 1u);
  EXPECT_EQ(eval["inferred_edges"][0]["tracker"], "trk-a");
  EXPECT_EQ(eval["inferred_edges"][0]["advertiser"], "dsp-1");
}

// Every inferred tracker must clear the accuracy gate and the gain cutoff,
// recomputed here from the report alone.
TEST_F(CliTest, ReportRespectsInferenceGate) {
  ASSERT_EQ(Cli("run --profile small --seed 5 --out " + Path("o")).code, 0);
  json report = json::parse(Slurp(Path("o/report.json")));
  const double threshold = report["config"]["accuracy_threshold"];
  for (const json& row : report["advertisers"]) {
    std::vector<double> gains;
    for (const json& g : row["gains"]) gains.push_back(g["gain"]);
    double mean = 0, var = 0;
    for (double g : gains) mean += g;
    mean /= gains.size();
    for (double g : gains) var += (g - mean) * (g - mean);
    const double cutoff = mean + std::sqrt(var / gains.size());
    const double accuracy = row["holdout_accuracy"].is_null()
                                ? row["cv_accuracy"].get<double>()
                                : row["holdout_accuracy"].get<double>();
    for (const json& g : row["gains"]) {
      const bool expected = accuracy >= threshold && g["gain"] > cutoff + 1e-9;
      if (std::fabs(g["gain"].get<double>() - cutoff) > 1e-9) {
        EXPECT_EQ(g["inferred"].get<bool>(), expected)
            << row["advertiser"] << " " << g["tracker"];
      }
    }
  }
}

TEST_F(CliTest, DisjointGroupsHaveZeroAcrossSimilarity) {
  std::string docs;
  for (int run = 0; run < 3; ++run) {
    docs += json{{"key", {{"id", "red"}, {"run", run}}},
                 {"tokens", {"apple", "cherry", run % 2 ? "rose" : "apple"}}}
                .dump() +
            "\n";
    docs += json{{"key", {{"id", "blue"}, {"run", run}}},
                 {"tokens", {"ocean", "sky", run % 2 ? "sky" : "denim"}}}
                .dump() +
            "\n";
  }
  Spit(Path("docs.jsonl"), docs);
  Result r = Cli("h1 --profile h1 --documents " + Path("docs.jsonl") +
                 " --out " + Path("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  std::istringstream csv(Slurp(Path("o/h1.csv")));
  std::string header, blue, red;
  std::getline(csv, header);
  std::getline(csv, blue);
  std::getline(csv, red);
  EXPECT_EQ(header, "group,blue,red");
  EXPECT_EQ(blue.substr(0, 5), "blue,");
  EXPECT_EQ(blue.substr(blue.rfind(',') + 1), "0.000000");
  EXPECT_EQ(red.substr(0, red.find(',', 4)), "red,0.000000");
}

}  // namespace
