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

#include "adtomo/ecosim.h"

#include <algorithm>
#include <set>

#include "gtest/gtest.h"

namespace adtomo::ecosim {
namespace {

WorldConfig TinyWorld() {
  WorldConfig w;
  w.groups = {{"sports",
               {"coach", "football", "goal", "jersey", "league", "marathon",
                "racket", "stadium", "tennis", "trophy"},
               0.3}};
  w.generic_pool = {"deal", "free", "offer", "sale", "shop"};
  w.websites = {{"train-1", "sports"}, {"train-2", "sports"}, {"news", ""}};
  w.trackers = {{"t1", {"train-1", "news"}, 1.0},
                {"t2", {"train-2", "news"}, 1.0},
                {"t3", {"train-1", "train-2"}, 1.0}};
  Advertiser a;
  a.id = "a1";
  a.base_bid = 1.0;
  a.creative_length = 6;
  Advertiser b = a;
  b.id = "a2";
  w.advertisers = {a, b};
  w.edges = {{"t1", "a1", 0.8}};
  AuctionSlot s1;
  s1.id = "s1";
  s1.website = "news";
  s1.floor_price = 0.5;
  s1.tiers = {{"a1"}};
  AuctionSlot s2 = s1;
  s2.id = "s2";
  s2.tiers = {};
  s2.mechanism = Mechanism::kHbClient;
  AuctionSlot s3 = s2;
  s3.id = "s3";
  s3.mechanism = Mechanism::kHbServer;
  w.slots = {s1, s2, s3};
  w.sync_pairs = {{"t1", "t2"}};
  return w;
}

World MustBuild(const WorldConfig& config) {
  auto w = BuildWorld(config, 1);
  EXPECT_TRUE(w.ok()) << w.status();
  return *std::move(w);
}

Persona Blocking(const World& world, std::vector<std::string> blocked) {
  Persona p{"p", "sports", {}, false};
  for (const auto& t : blocked) p.blocking.mask |= 1ULL << *world.TrackerIndex(t);
  return p;
}

void ExpectFieldError(const WorldConfig& config, const std::string& path) {
  auto w = BuildWorld(config, 1);
  ASSERT_FALSE(w.ok());
  EXPECT_EQ(w.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_NE(std::string(w.status().message()).find(path), std::string::npos)
      << w.status();
}

TEST(BuildWorldTest, ValidConfigBuilds) {
  World w = MustBuild(TinyWorld());
  EXPECT_EQ(w.TrackerIds(), (std::vector<std::string>{"t1", "t2", "t3"}));
  EXPECT_TRUE(w.graph().Contains("t1", "a1"));
  EXPECT_FALSE(w.graph().Contains("t2", "a1"));
}

TEST(BuildWorldTest, FieldPathDiagnostics) {
  WorldConfig c = TinyWorld();
  c.edges[0].reliability = 1.5;
  ExpectFieldError(c, "world.edges[0].reliability");

  c = TinyWorld();
  c.edges[0].tracker = "nope";
  ExpectFieldError(c, "world.edges[0].tracker");

  c = TinyWorld();
  c.trackers[1].id = "t1";
  ExpectFieldError(c, "world.trackers[1].id");

  c = TinyWorld();
  c.advertisers[0].id = "t1";
  ExpectFieldError(c, "also an advertiser id");

  c = TinyWorld();
  c.slots[0].tiers = {{"a1"}, {"a1"}};
  ExpectFieldError(c, "world.slots[0].tiers");

  c = TinyWorld();
  c.sync_pairs = {{"t1", "t1"}};
  ExpectFieldError(c, "world.sync_pairs[0]");

  c = TinyWorld();
  c.trackers[0].observe_prob = -0.1;
  ExpectFieldError(c, "world.trackers[0].observe_prob");
}

TEST(KnowledgeTest, SingleEdgeMonteCarlo) {
  World w = MustBuild(TinyWorld());
  Persona p = Blocking(w, {});
  const int n = 20000;
  int known = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(99, "k", {static_cast<uint64_t>(i)}));
    known += *KnowledgeState("a1", p, w, rng);
  }
  EXPECT_NEAR(static_cast<double>(known) / n, 0.8, 0.02);
}

TEST(KnowledgeTest, TwoEdgesCombineByOr) {
  WorldConfig c = TinyWorld();
  c.edges = {{"t1", "a1", 0.5}, {"t2", "a1", 0.5}};
  World w = MustBuild(c);
  Persona p = Blocking(w, {});
  const int n = 20000;
  int known = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(5, "k", {static_cast<uint64_t>(i)}));
    known += *KnowledgeState("a1", p, w, rng);
  }
  EXPECT_NEAR(static_cast<double>(known) / n, 0.75, 0.02);
}

TEST(KnowledgeTest, BlockingTheOnlySourceBlocksKnowledge) {
  World w = MustBuild(TinyWorld());
  Persona blocked = Blocking(w, {"t1"});
  for (int i = 0; i < 2000; ++i) {
    Rng rng(i);
    EXPECT_FALSE(*KnowledgeState("a1", blocked, w, rng));
  }
  Persona no_edge = Blocking(w, {});
  for (int i = 0; i < 200; ++i) {
    Rng rng(i);
    EXPECT_FALSE(*KnowledgeState("a2", no_edge, w, rng));
  }
}

TEST(KnowledgeTest, MoreBlockingNeverAddsKnowledge) {
  WorldConfig c = TinyWorld();
  c.trackers[0].observe_prob = 0.6;
  c.trackers[1].observe_prob = 0.7;
  c.edges = {{"t1", "a1", 0.7}, {"t2", "a1", 0.6}, {"t3", "a1", 0.5}};
  World w = MustBuild(c);
  for (uint64_t small = 0; small < 8; ++small) {
    for (uint64_t big = 0; big < 8; ++big) {
      if ((small & big) != small) continue;
      Persona ps{"p", "sports", {small}, false};
      Persona pb{"p", "sports", {big}, false};
      for (int i = 0; i < 300; ++i) {
        Rng r1(i), r2(i);
        const bool ks = *KnowledgeState("a1", ps, w, r1);
        const bool kb = *KnowledgeState("a1", pb, w, r2);
        EXPECT_TRUE(ks || !kb) << small << " " << big << " " << i;
      }
    }
  }
}

TEST(CreativeTest, VocabularySource) {
  World w = MustBuild(TinyWorld());
  const InterestGroup& g = w.groups()[0];
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto known = GenerateCreative(w, "a1", true, g, rng);
    ASSERT_EQ(known->tokens.size(), 6u);
    for (const auto& t : known->tokens) {
      EXPECT_NE(std::find(g.vocabulary.begin(), g.vocabulary.end(), t),
                g.vocabulary.end());
    }
    auto generic = GenerateCreative(w, "a1", false, g, rng);
    for (const auto& t : generic->tokens) {
      EXPECT_NE(std::find(w.generic_pool().begin(), w.generic_pool().end(), t),
                w.generic_pool().end());
    }
  }
}

TEST(CreativeTest, GenericPoolOverlapsGroupVocabulary) {
  World w = MustBuild(TinyWorld());
  // round(0.3 * 10) = 3 lexicographically first group tokens join the pool.
  const std::set<std::string> pool(w.generic_pool().begin(),
                                   w.generic_pool().end());
  EXPECT_EQ(pool.size(), 8u);
  for (const char* t : {"coach", "football", "goal"}) EXPECT_TRUE(pool.count(t));
  EXPECT_FALSE(pool.count("jersey"));
  EXPECT_EQ(w.ExclusiveVocabulary(0).size(), 7u);

  // Untargeted tokens hit the group vocabulary with probability 3/8.
  const InterestGroup& g = w.groups()[0];
  Rng rng(2);
  const int creatives = 5000;
  int overlap = 0;
  for (int i = 0; i < creatives; ++i) {
    auto creative = GenerateCreative(w, "a1", false, g, rng);
    for (const auto& t : creative->tokens) {
      overlap += std::find(g.vocabulary.begin(), g.vocabulary.end(), t) !=
                 g.vocabulary.end();
    }
  }
  const double n = creatives * 6.0;
  const double p = 3.0 / 8.0;
  EXPECT_NEAR(overlap / n, p, 5 * std::sqrt(p * (1 - p) / n));
}

TEST(AuctionTest, WaterfallFallsThroughTiers) {
  AuctionSlot slot;
  slot.floor_price = 0.5;
  std::vector<std::vector<Bid>> tiers = {{{"a", 0.4, 0}, {"b", 0.45, 0}},
                                         {{"c", 0.9, 0}, {"d", 0.7, 0}}};
  auto r = AuctionRtb(slot, tiers);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->winner, "c");
  EXPECT_EQ(r->price, 0.9);
  EXPECT_TRUE(r->bid_log.empty());

  tiers = {{{"b", 0.6, 0}, {"a", 0.6, 0}}};
  EXPECT_EQ(AuctionRtb(slot, tiers)->winner, "a");

  tiers = {{{"a", 0.1, 0}}, {{"b", 0.2, 0}}};
  EXPECT_FALSE(AuctionRtb(slot, tiers)->winner.has_value());
}

TEST(AuctionTest, HeaderBiddingDropsLateBids) {
  AuctionSlot slot;
  slot.floor_price = 0.5;
  std::vector<Bid> bids = {{"c", 2.0, 500}, {"b", 0.8, 100}, {"a", 0.7, 50}};
  auto r = AuctionHb(slot, bids, 300);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->winner, "b");
  ASSERT_EQ(r->bid_log.size(), 2u);
  EXPECT_EQ(r->bid_log[0].advertiser, "a");
  EXPECT_EQ(r->bid_log[1].advertiser, "b");
}

TEST(AuctionTest, WaterfallAndHeaderBiddingDiverge) {
  AuctionSlot slot;
  slot.floor_price = 0.5;
  std::vector<std::vector<Bid>> tiers = {{{"a", 0.6, 0}}, {{"b", 0.9, 0}}};
  std::vector<Bid> flat = {{"a", 0.6, 0}, {"b", 0.9, 0}};
  EXPECT_EQ(AuctionRtb(slot, tiers)->winner, "a");
  EXPECT_EQ(AuctionHb(slot, flat, 1000)->winner, "b");
}

TEST(AuctionTest, NegativeBidRejected) {
  AuctionSlot slot;
  std::vector<Bid> flat = {{"a", -1.0, 0}};
  EXPECT_FALSE(AuctionHb(slot, flat, 1000).ok());
}

TEST(PersonaTest, PlanEnumeratesEverySubset) {
  World w = MustBuild(TinyWorld());
  RunConfig run;
  run.persona_plan = PersonaPlan{"sports", 12};
  auto personas = ResolvePersonas(w, run);
  ASSERT_TRUE(personas.ok());
  ASSERT_EQ(personas->size(), 8u + 12u);
  std::set<uint64_t> masks;
  for (const auto& p : *personas) {
    if (p.is_control) {
      EXPECT_TRUE(p.blocking.empty());
    } else {
      masks.insert(p.blocking.mask);
    }
  }
  EXPECT_EQ(masks.size(), 8u);
  EXPECT_EQ(BlockingPersonaId(5, 10), "p0005");
  EXPECT_EQ(ControlPersonaId(3, 100), "c03");
  EXPECT_LT(BlockingPersonaId(9, 10), BlockingPersonaId(10, 10));
}

TEST(PersonaTest, ControlsMayNotBlock) {
  World w = MustBuild(TinyWorld());
  RunConfig run;
  run.personas = {{"c1", "sports", {"t1"}, true}};
  auto r = ResolvePersonas(w, run);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(std::string(r.status().message()).find("run.personas[0].blocked"),
            std::string::npos);
}

std::vector<Persona> SomePersonas(const World& w) {
  RunConfig run;
  run.persona_plan = PersonaPlan{"sports", 3};
  return *ResolvePersonas(w, run);
}

TEST(SimulationTest, DeterministicAndOrderIndependent) {
  World w = MustBuild(TinyWorld());
  std::vector<Persona> personas = SomePersonas(w);
  auto a = RunSimulation(w, personas, 3, 17);
  ASSERT_TRUE(a.ok()) << a.status();
  std::reverse(personas.begin(), personas.end());
  auto b = RunSimulation(w, personas, 3, 17);
  ASSERT_TRUE(b.ok());
  ASSERT_EQ(a->ads.size(), b->ads.size());
  for (size_t i = 0; i < a->ads.size(); ++i) {
    EXPECT_EQ(a->ads[i].persona, b->ads[i].persona);
    EXPECT_EQ(a->ads[i].tokens, b->ads[i].tokens);
  }
  ASSERT_EQ(a->requests.size(), b->requests.size());
  ASSERT_EQ(a->bids.size(), b->bids.size());
  for (size_t i = 0; i < a->bids.size(); ++i) {
    EXPECT_EQ(a->bids[i].bid, b->bids[i].bid);
  }
  auto c = RunSimulation(w, personas, 3, 18);
  bool differs = false;
  for (size_t i = 0; i < a->ads.size() && i < c->ads.size(); ++i) {
    differs |= a->ads[i].tokens != c->ads[i].tokens;
  }
  EXPECT_TRUE(differs);
}

TEST(SimulationTest, AuctionConservation) {
  World w = MustBuild(TinyWorld());
  std::vector<Persona> personas = SomePersonas(w);
  const int runs = 4;
  auto logs = RunSimulation(w, personas, runs, 3);
  ASSERT_TRUE(logs.ok());
  EXPECT_EQ(logs->outcomes.size(), personas.size() * runs * w.slots().size());
  size_t sold = 0;
  for (const auto& o : logs->outcomes) sold += o.winner.has_value();
  EXPECT_EQ(logs->ads.size(), sold);
  for (const auto& ad : logs->ads) EXPECT_EQ(ad.tokens.size(), 6u);
  // The client-side slot exposes bids; the server-side one does not.
  std::set<std::string> bid_slots;
  for (const auto& b : logs->bids) bid_slots.insert(b.slot);
  EXPECT_EQ(bid_slots, (std::set<std::string>{"s2"}));
}

TEST(SimulationTest, BlockedPersonaGetsOnlyGenericAdsFromSharedAdvertiser) {
  World w = MustBuild(TinyWorld());
  RunConfig run;
  run.personas = {{"blocker", "sports", {"t1"}, false},
                  {"control", "sports", {}, true}};
  auto personas = ResolvePersonas(w, run);
  auto logs = RunSimulation(w, *personas, 20, 5);
  ASSERT_TRUE(logs.ok());
  const auto& exclusive = w.ExclusiveVocabulary(0);
  int control_targeted = 0;
  for (const auto& ad : logs->ads) {
    if (ad.advertiser != "a1") continue;
    bool targeted = false;
    for (const auto& t : ad.tokens) {
      targeted |= std::find(exclusive.begin(), exclusive.end(), t) !=
                  exclusive.end();
    }
    if (ad.persona == "blocker") EXPECT_FALSE(targeted);
    if (ad.persona == "control") control_targeted += targeted;
  }
  EXPECT_GT(control_targeted, 0);
}

TEST(SimulationTest, RequestChainsCarryCookiesAndSyncs) {
  World w = MustBuild(TinyWorld());
  std::vector<Persona> personas = SomePersonas(w);
  auto logs = RunSimulation(w, personas, 1, 3);
  ASSERT_TRUE(logs.ok());
  bool saw_sync = false;
  for (const auto& r : logs->requests) {
    ASSERT_TRUE(r.cookie_sent.has_value());
    EXPECT_EQ(IdentifierOwner(*r.cookie_sent), r.destination_domain);
    if (r.chain_position == 1) {
      saw_sync = true;
      EXPECT_EQ(r.source_domain, "t1");
      EXPECT_EQ(r.destination_domain, "t2");
      EXPECT_EQ(IdentifierOwner(*r.uid_param), "t1");
    }
  }
  EXPECT_TRUE(saw_sync);
}

TEST(IdentifierTest, OwnerRoundTrip) {
  EXPECT_EQ(MakeIdentifier("t1", "p0001"), "t1:p0001");
  EXPECT_EQ(IdentifierOwner("t1:p0001"), "t1");
  EXPECT_EQ(IdentifierOwner("bare"), "bare");
}

}  // namespace
}  // namespace adtomo::ecosim
