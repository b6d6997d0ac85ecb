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

#include "adtomo/profiles.h"

#include "absl/strings/str_cat.h"

namespace adtomo {
namespace {

using ecosim::Advertiser;
using ecosim::AuctionSlot;
using ecosim::Mechanism;
using ecosim::SharingEdge;
using ecosim::TrackerOrg;
using ecosim::Website;

const std::vector<std::string>& GenericPool() {
  static const auto* pool = new std::vector<std::string>{
      "best",  "deal",     "discount", "free",  "new",  "offer",
      "online", "sale",    "save",     "shipping", "shop", "today"};
  return *pool;
}

ecosim::InterestGroup Group(std::string id, std::vector<std::string> vocab,
                            double overlap) {
  return {std::move(id), std::move(vocab), overlap};
}

ecosim::InterestGroup Sports(double overlap) {
  return Group("sports",
               {"coach", "football", "goal", "jersey", "league", "marathon",
                "playoff", "racket", "sneakers", "stadium", "tennis",
                "trophy"},
               overlap);
}

Advertiser MakeAdvertiser(std::string id) {
  Advertiser a;
  a.id = std::move(id);
  a.base_bid = 1.0;
  a.knowledge_boost = 0.5;
  a.bid_noise_sd = 0.1;
  a.creative_length = 8;
  a.latency_mean = 200.0;
  a.latency_sd = 60.0;
  return a;
}

AuctionSlot RtbSlot(std::string id, std::string site,
                    std::vector<std::vector<std::string>> tiers) {
  AuctionSlot s;
  s.id = std::move(id);
  s.website = std::move(site);
  s.floor_price = 0.5;
  s.mechanism = Mechanism::kRtbWaterfall;
  s.tiers = std::move(tiers);
  return s;
}

AuctionSlot HbSlot(std::string id, std::string site, Mechanism mechanism) {
  AuctionSlot s;
  s.id = std::move(id);
  s.website = std::move(site);
  s.floor_price = 0.5;
  s.mechanism = mechanism;
  s.timeout = 300.0;
  return s;
}

// One interest group, blocking personas for every tracker subset, pooled
// controls. Each advertiser owns `dedicated_slots` waterfall slots where it
// is the only bidder, so its creatives reach every persona; a client-side
// and a server-side header-bidding slot are contested by all advertisers.
PipelineConfig SingleGroupWorld(const std::vector<std::string>& trackers,
                                const std::vector<std::string>& advertisers,
                                std::vector<SharingEdge> edges,
                                int training_sites, int dedicated_slots,
                                int controls) {
  PipelineConfig c;
  ecosim::WorldConfig& w = c.sim.world;
  w.groups.push_back(Sports(0.25));
  w.generic_pool = GenericPool();
  std::vector<std::string> training;
  for (int i = 1; i <= training_sites; ++i) {
    training.push_back(absl::StrCat("sports-site-", i));
    w.websites.push_back({training.back(), "sports"});
  }
  const int news_sites = 4;
  std::vector<std::string> news;
  for (int i = 1; i <= news_sites; ++i) {
    news.push_back(absl::StrCat("news-", i));
    w.websites.push_back({news.back(), ""});
  }
  // Tracker i covers three consecutive training sites and every news site.
  for (size_t i = 0; i < trackers.size(); ++i) {
    TrackerOrg t;
    t.id = trackers[i];
    for (int k = 0; k < 3; ++k) {
      t.site_coverage.push_back(training[(i + k) % training.size()]);
    }
    t.site_coverage.insert(t.site_coverage.end(), news.begin(), news.end());
    t.observe_prob = 0.9;
    w.trackers.push_back(std::move(t));
  }
  for (const auto& a : advertisers) w.advertisers.push_back(MakeAdvertiser(a));
  w.edges = std::move(edges);
  int next_site = 0;
  for (const auto& a : advertisers) {
    for (int k = 0; k < dedicated_slots; ++k) {
      w.slots.push_back(RtbSlot(absl::StrCat("slot-", a, "-", k + 1),
                                news[next_site++ % news_sites], {{a}}));
    }
  }
  w.slots.push_back(HbSlot("hb-client", news[0], Mechanism::kHbClient));
  w.slots.push_back(HbSlot("hb-server", news[1], Mechanism::kHbServer));
  for (size_t i = 0; i + 1 < trackers.size(); i += 2) {
    w.sync_pairs.push_back({trackers[i], trackers[i + 1]});
  }

  c.sim.run.persona_plan = ecosim::PersonaPlan{"sports", controls};
  c.sim.run.runs = 10;
  c.holdout_runs = 2;
  c.folds = 4;
  c.accuracy_threshold = 0.6;
  SetSeed(c, 1);
  c.output_dir = "out";
  return c;
}

const std::vector<std::string> kSmallTrackers = {"trk-a", "trk-b", "trk-c",
                                                 "trk-d", "trk-e", "trk-f"};
const std::vector<std::string> kSmallAdvertisers = {"dsp-1", "dsp-2", "dsp-3",
                                                    "dsp-4", "dsp-5"};

PipelineConfig Small() {
  return SingleGroupWorld(kSmallTrackers, kSmallAdvertisers,
                          {{"trk-a", "dsp-1", 0.95},
                           {"trk-b", "dsp-2", 0.95},
                           {"trk-c", "dsp-3", 0.9},
                           {"trk-d", "dsp-4", 0.95}},
                          /*training_sites=*/6, /*dedicated_slots=*/2,
                          /*controls=*/20);
}

PipelineConfig SmallEmpty() {
  return SingleGroupWorld(kSmallTrackers, kSmallAdvertisers, {}, 6, 2, 20);
}

PipelineConfig SingleEdge() {
  return SingleGroupWorld(kSmallTrackers, kSmallAdvertisers,
                          {{"trk-a", "dsp-1", 0.95}}, 6, 2, 20);
}

PipelineConfig Desk() {
  const std::vector<std::string> trackers = {
      "33across", "adobe",    "alphabet", "facebook",       "gumgum",
      "index-exchange", "openx", "oracle", "pubmatic", "rubicon"};
  const std::vector<std::string> advertisers = {
      "dsp-adform",       "dsp-amazon",    "dsp-criteo",
      "dsp-exp-ad-intel", "dsp-flashtalking", "dsp-media-math",
      "dsp-openx",        "dsp-pubmatic",  "dsp-trade-desk"};
  std::vector<SharingEdge> edges = {
      {"oracle", "dsp-openx", 0.9},
      {"alphabet", "dsp-openx", 0.9},
      {"openx", "dsp-exp-ad-intel", 0.9},
      {"gumgum", "dsp-trade-desk", 0.9},
      {"alphabet", "dsp-adform", 0.9},
      {"alphabet", "dsp-pubmatic", 0.9},
      {"openx", "dsp-media-math", 0.9},
      {"facebook", "dsp-media-math", 0.9},
      {"alphabet", "dsp-amazon", 0.9},
      {"alphabet", "dsp-flashtalking", 0.9},
      {"alphabet", "dsp-criteo", 0.9},
  };
  return SingleGroupWorld(trackers, advertisers, std::move(edges),
                          /*training_sites=*/10, /*dedicated_slots=*/2,
                          /*controls=*/100);
}

PipelineConfig H1() {
  PipelineConfig c;
  ecosim::WorldConfig& w = c.sim.world;
  w.groups = {
      Sports(0.3),
      Group("cooking",
            {"bake", "chef", "flour", "grill", "kitchen", "oven", "pasta",
             "recipe", "saucepan", "spice", "taste", "whisk"},
            0.3),
      Group("travel",
            {"airline", "beach", "cruise", "flight", "hotel", "luggage",
             "passport", "resort", "suitcase", "tour", "vacation", "visa"},
            0.3),
  };
  w.generic_pool = GenericPool();
  std::vector<std::string> sites;
  for (const auto& g : w.groups) {
    for (int i = 1; i <= 2; ++i) {
      sites.push_back(absl::StrCat(g.id, "-site-", i));
      w.websites.push_back({sites.back(), g.id});
    }
  }
  w.websites.push_back({"news-1", ""});
  w.websites.push_back({"news-2", ""});
  for (const std::string t : {"trk-a", "trk-b", "trk-c"}) {
    TrackerOrg tracker;
    tracker.id = t;
    tracker.site_coverage = sites;
    tracker.site_coverage.push_back("news-1");
    tracker.site_coverage.push_back("news-2");
    tracker.observe_prob = 0.9;
    w.trackers.push_back(std::move(tracker));
  }
  const std::vector<std::string> advertisers = {"dsp-1", "dsp-2", "dsp-3"};
  for (size_t i = 0; i < advertisers.size(); ++i) {
    w.advertisers.push_back(MakeAdvertiser(advertisers[i]));
    w.edges.push_back({w.trackers[i].id, advertisers[i], 0.9});
  }
  // An advertiser nobody shares with fills slot-3 with generic creatives, so
  // documents of different groups overlap.
  w.advertisers.push_back(MakeAdvertiser("dsp-generic"));
  w.slots = {RtbSlot("slot-1", "news-1", {}), RtbSlot("slot-2", "news-1", {}),
             RtbSlot("slot-3", "news-2", {{"dsp-generic"}}),
             HbSlot("hb-client", "news-2", Mechanism::kHbClient)};
  for (const auto& g : w.groups) {
    for (int i = 1; i <= 3; ++i) {
      c.sim.run.personas.push_back(
          {absl::StrCat(g.id, "-", i), g.id, {}, /*is_control=*/false});
    }
  }
  c.sim.run.runs = 9;
  c.holdout_runs = 1;
  c.folds = 4;
  SetSeed(c, 1);
  return c;
}

}  // namespace

std::vector<std::string> ProfileNames() {
  return {"desk", "h1", "single-edge", "small", "small-empty"};
}

absl::StatusOr<PipelineConfig> Profile(absl::string_view name) {
  if (name == "small") return Small();
  if (name == "small-empty") return SmallEmpty();
  if (name == "single-edge") return SingleEdge();
  if (name == "h1") return H1();
  if (name == "desk") return Desk();
  return absl::InvalidArgumentError(
      absl::StrCat("unknown profile '", name, "'"));
}

}  // namespace adtomo
