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

#include "adtomo/syncdetect.h"

#include <algorithm>
#include <random>

#include "gtest/gtest.h"

namespace adtomo::syncdetect {
namespace {

using ecosim::RequestLogEntry;

RequestLogEntry Hop(int chain, int pos, std::string src, std::string dst,
                    std::optional<std::string> cookie,
                    std::optional<std::string> uid) {
  return {0, "p1", chain, pos, std::move(src), std::move(dst),
          std::move(cookie), std::move(uid)};
}

std::vector<std::pair<std::string, std::string>> Pairs(
    const std::vector<SyncPair>& pairs) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : pairs) out.emplace_back(p.initiator, p.receiver);
  return out;
}

TEST(SyncDetectTest, CookieAndUidMakeAPair) {
  std::vector<RequestLogEntry> log = {
      Hop(0, 0, "t1", "t2", "t2:p1", "t1:p1")};
  auto d = DetectCookieSync(log);
  ASSERT_TRUE(d.ok());
  ASSERT_EQ(Pairs(d->pairs),
            (std::vector<std::pair<std::string, std::string>>{{"t1", "t2"}}));
  EXPECT_EQ(d->pairs[0].evidence.size(), 1u);
  EXPECT_TRUE(d->weak.empty());
}

TEST(SyncDetectTest, NoCookieNoUidIsNothing) {
  std::vector<RequestLogEntry> log = {
      Hop(0, 0, "t1", "t2", std::nullopt, std::nullopt)};
  auto d = DetectCookieSync(log);
  ASSERT_TRUE(d.ok());
  EXPECT_TRUE(d->pairs.empty());
  EXPECT_TRUE(d->weak.empty());
}

TEST(SyncDetectTest, ChainWithTwoQualifyingHops) {
  std::vector<RequestLogEntry> log = {
      Hop(0, 0, "t1", "t2", "t2:p1", "t1:p1"),
      Hop(0, 1, "t2", "t3", "t3:p1", "t2:p1")};
  auto d = DetectCookieSync(log);
  ASSERT_TRUE(d.ok());
  EXPECT_EQ(Pairs(d->pairs),
            (std::vector<std::pair<std::string, std::string>>{{"t1", "t2"},
                                                              {"t2", "t3"}}));
}

TEST(SyncDetectTest, CookieOnlyRedirectIsWeak) {
  std::vector<RequestLogEntry> log = {
      Hop(0, 0, "site", "t1", "t1:p1", std::nullopt),
      Hop(0, 1, "t1", "t2", "t2:p1", std::nullopt),
      // A uid from someone other than the source is not evidence either.
      Hop(1, 0, "site", "t1", "t1:p1", std::nullopt),
      Hop(1, 1, "t1", "t3", "t3:p1", "t9:p1")};
  auto d = DetectCookieSync(log);
  ASSERT_TRUE(d.ok());
  EXPECT_TRUE(d->pairs.empty());
  EXPECT_EQ(Pairs(d->weak),
            (std::vector<std::pair<std::string, std::string>>{{"t1", "t2"},
                                                              {"t1", "t3"}}));
}

TEST(SyncDetectTest, WrongCookieOwnerIsIgnored) {
  std::vector<RequestLogEntry> log = {
      Hop(0, 0, "site", "t1", "t1:p1", std::nullopt),
      Hop(0, 1, "t1", "t2", "t1:p1", "t1:p1")};
  auto d = DetectCookieSync(log);
  ASSERT_TRUE(d.ok());
  EXPECT_TRUE(d->pairs.empty());
}

TEST(SyncDetectTest, PositionGapIsMalformed) {
  std::vector<RequestLogEntry> log = {
      Hop(0, 0, "site", "t1", "t1:p1", std::nullopt),
      Hop(0, 2, "t1", "t2", "t2:p1", "t1:p1")};
  auto d = DetectCookieSync(log);
  ASSERT_FALSE(d.ok());
  EXPECT_NE(std::string(d.status().message()).find("malformed chain"),
            std::string::npos);
}

TEST(SyncDetectTest, EvidenceAccumulatesAndOrderDoesNotMatter) {
  std::vector<RequestLogEntry> log;
  for (int chain = 0; chain < 10; ++chain) {
    log.push_back(Hop(chain, 0, "site", "t1", "t1:p1", std::nullopt));
    log.push_back(Hop(chain, 1, "t1", "t2", "t2:p1", "t1:p1"));
  }
  auto a = DetectCookieSync(log);
  std::shuffle(log.begin(), log.end(), std::mt19937_64(3));
  auto b = DetectCookieSync(log);
  ASSERT_TRUE(a.ok() && b.ok());
  ASSERT_EQ(a->pairs.size(), 1u);
  EXPECT_EQ(a->pairs[0].evidence.size(), 10u);
  ASSERT_EQ(b->pairs.size(), 1u);
  EXPECT_EQ(a->pairs[0].evidence, b->pairs[0].evidence);
}

}  // namespace
}  // namespace adtomo::syncdetect
