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
#include <cctype>
#include <cmath>
#include <set>
#include <tuple>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "adtomo/status_macros.h"

namespace adtomo::ecosim {
namespace {

absl::Status FieldError(absl::string_view path, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", message));
}

bool InUnitInterval(double p) { return p >= 0.0 && p <= 1.0; }

bool ValidToken(absl::string_view token) {
  if (token.empty()) return false;
  return std::none_of(token.begin(), token.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

template <typename T>
std::map<std::string, size_t, std::less<>> IndexById(const std::vector<T>& v) {
  std::map<std::string, size_t, std::less<>> index;
  for (size_t i = 0; i < v.size(); ++i) index.emplace(v[i].id, i);
  return index;
}

// Checks ids are non-empty and unique; returns the config positions sorted by
// id so callers can report paths in terms of the original order.
template <typename T>
absl::Status CheckIds(const std::vector<T>& items, absl::string_view section) {
  std::map<absl::string_view, size_t> seen;
  for (size_t i = 0; i < items.size(); ++i) {
    const std::string path = absl::StrCat("world.", section, "[", i, "].id");
    if (items[i].id.empty()) return FieldError(path, "must be non-empty");
    auto [it, inserted] = seen.emplace(items[i].id, i);
    if (!inserted) {
      return FieldError(path, absl::StrCat("duplicate id '", items[i].id,
                                           "' (also at index ", it->second,
                                           ")"));
    }
  }
  return absl::OkStatus();
}

template <typename T>
std::vector<T> SortedById(std::vector<T> v) {
  std::sort(v.begin(), v.end(),
            [](const T& a, const T& b) { return a.id < b.id; });
  return v;
}

std::optional<size_t> Lookup(
    const std::map<std::string, size_t, std::less<>>& index,
    absl::string_view id) {
  auto it = index.find(id);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

double DrawBid(const Advertiser& a, bool known, Rng& rng) {
  const double noise = rng.Normal(0.0, a.bid_noise_sd);
  const double bid =
      a.base_bid + (known ? a.knowledge_boost : 0.0) + noise;
  return std::max(0.0, bid);
}

double DrawLatency(const Advertiser& a, Rng& rng) {
  return std::max(0.0, rng.Normal(a.latency_mean, a.latency_sd));
}

// Highest bid, lowest advertiser id on ties.
const Bid* BestBid(std::span<const Bid> bids) {
  const Bid* best = nullptr;
  for (const Bid& b : bids) {
    if (best == nullptr || b.value > best->value ||
        (b.value == best->value && b.advertiser < best->advertiser)) {
      best = &b;
    }
  }
  return best;
}

}  // namespace

bool SharingGraph::Contains(absl::string_view tracker,
                            absl::string_view advertiser) const {
  return std::any_of(edges.begin(), edges.end(), [&](const SharingEdge& e) {
    return e.tracker == tracker && e.advertiser == advertiser;
  });
}

absl::string_view MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kRtbWaterfall:
      return "rtb_waterfall";
    case Mechanism::kHbClient:
      return "hb_client";
    case Mechanism::kHbServer:
      return "hb_server";
  }
  return "unknown";
}

std::optional<Mechanism> ParseMechanism(absl::string_view name) {
  if (name == "rtb_waterfall") return Mechanism::kRtbWaterfall;
  if (name == "hb_client") return Mechanism::kHbClient;
  if (name == "hb_server") return Mechanism::kHbServer;
  return std::nullopt;
}

std::vector<std::string> World::TrackerIds() const {
  std::vector<std::string> ids;
  for (const auto& t : trackers_) ids.push_back(t.id);
  return ids;
}

std::vector<std::string> World::AdvertiserIds() const {
  std::vector<std::string> ids;
  for (const auto& a : advertisers_) ids.push_back(a.id);
  return ids;
}

std::optional<size_t> World::GroupIndex(absl::string_view id) const {
  return Lookup(group_index_, id);
}
std::optional<size_t> World::TrackerIndex(absl::string_view id) const {
  return Lookup(tracker_index_, id);
}
std::optional<size_t> World::AdvertiserIndex(absl::string_view id) const {
  return Lookup(advertiser_index_, id);
}
std::optional<size_t> World::WebsiteIndex(absl::string_view id) const {
  return Lookup(website_index_, id);
}

absl::StatusOr<World> BuildWorld(const WorldConfig& config, uint64_t seed) {
  RETURN_IF_ERROR(CheckIds(config.groups, "groups"));
  RETURN_IF_ERROR(CheckIds(config.websites, "websites"));
  RETURN_IF_ERROR(CheckIds(config.trackers, "trackers"));
  RETURN_IF_ERROR(CheckIds(config.advertisers, "advertisers"));
  RETURN_IF_ERROR(CheckIds(config.slots, "slots"));

  if (config.groups.empty()) {
    return FieldError("world.groups", "at least one interest group required");
  }
  if (config.trackers.size() > kMaxTrackers) {
    return FieldError("world.trackers",
                      absl::StrCat("at most ", kMaxTrackers, " trackers"));
  }

  std::set<absl::string_view> group_ids, website_ids, tracker_ids, adv_ids;
  for (const auto& g : config.groups) group_ids.insert(g.id);
  for (const auto& w : config.websites) website_ids.insert(w.id);
  for (const auto& t : config.trackers) tracker_ids.insert(t.id);
  for (const auto& a : config.advertisers) adv_ids.insert(a.id);

  for (size_t i = 0; i < config.groups.size(); ++i) {
    const auto& g = config.groups[i];
    const std::string path = absl::StrCat("world.groups[", i, "]");
    if (g.vocabulary.empty()) {
      return FieldError(absl::StrCat(path, ".vocabulary"),
                        "must be non-empty");
    }
    for (size_t j = 0; j < g.vocabulary.size(); ++j) {
      if (!ValidToken(g.vocabulary[j])) {
        return FieldError(absl::StrCat(path, ".vocabulary[", j, "]"),
                          "tokens must be non-empty and contain no spaces");
      }
    }
    if (!InUnitInterval(g.generic_overlap)) {
      return FieldError(absl::StrCat(path, ".generic_overlap"),
                        "must be in [0,1]");
    }
  }
  for (size_t j = 0; j < config.generic_pool.size(); ++j) {
    if (!ValidToken(config.generic_pool[j])) {
      return FieldError(absl::StrCat("world.generic_pool[", j, "]"),
                        "tokens must be non-empty and contain no spaces");
    }
  }
  for (size_t i = 0; i < config.websites.size(); ++i) {
    const auto& w = config.websites[i];
    if (!w.group.empty() && !group_ids.contains(w.group)) {
      return FieldError(absl::StrCat("world.websites[", i, "].group"),
                        absl::StrCat("unknown group '", w.group, "'"));
    }
  }
  for (size_t i = 0; i < config.trackers.size(); ++i) {
    const auto& t = config.trackers[i];
    const std::string path = absl::StrCat("world.trackers[", i, "]");
    if (t.id.find(':') != std::string::npos) {
      return FieldError(absl::StrCat(path, ".id"), "must not contain ':'");
    }
    if (adv_ids.contains(t.id)) {
      return FieldError(absl::StrCat(path, ".id"),
                        absl::StrCat("'", t.id,
                                     "' is also an advertiser id; tracker and "
                                     "advertiser ids must be disjoint"));
    }
    if (!InUnitInterval(t.observe_prob)) {
      return FieldError(absl::StrCat(path, ".observe_prob"),
                        "must be in [0,1]");
    }
    for (size_t j = 0; j < t.site_coverage.size(); ++j) {
      if (!website_ids.contains(t.site_coverage[j])) {
        return FieldError(
            absl::StrCat(path, ".site_coverage[", j, "]"),
            absl::StrCat("unknown website '", t.site_coverage[j], "'"));
      }
    }
  }
  for (size_t i = 0; i < config.advertisers.size(); ++i) {
    const auto& a = config.advertisers[i];
    const std::string path = absl::StrCat("world.advertisers[", i, "]");
    if (!(a.base_bid >= 0)) {
      return FieldError(absl::StrCat(path, ".base_bid"), "must be >= 0");
    }
    if (!(a.knowledge_boost >= 0)) {
      return FieldError(absl::StrCat(path, ".knowledge_boost"),
                        "must be >= 0");
    }
    if (!(a.bid_noise_sd >= 0)) {
      return FieldError(absl::StrCat(path, ".bid_noise_sd"), "must be >= 0");
    }
    if (a.creative_length < 1) {
      return FieldError(absl::StrCat(path, ".creative_length"),
                        "must be >= 1");
    }
    if (!(a.latency_mean >= 0) || !(a.latency_sd >= 0)) {
      return FieldError(absl::StrCat(path, ".latency"), "must be >= 0");
    }
  }
  std::set<std::pair<absl::string_view, absl::string_view>> edge_pairs;
  for (size_t i = 0; i < config.edges.size(); ++i) {
    const auto& e = config.edges[i];
    const std::string path = absl::StrCat("world.edges[", i, "]");
    if (!tracker_ids.contains(e.tracker)) {
      return FieldError(absl::StrCat(path, ".tracker"),
                        absl::StrCat("unknown tracker '", e.tracker, "'"));
    }
    if (!adv_ids.contains(e.advertiser)) {
      return FieldError(
          absl::StrCat(path, ".advertiser"),
          absl::StrCat("unknown advertiser '", e.advertiser, "'"));
    }
    if (!InUnitInterval(e.reliability)) {
      return FieldError(absl::StrCat(path, ".reliability"),
                        "must be in [0,1]");
    }
    if (!edge_pairs.emplace(e.tracker, e.advertiser).second) {
      return FieldError(path, absl::StrCat("duplicate edge ", e.tracker,
                                           " -> ", e.advertiser));
    }
  }
  for (size_t i = 0; i < config.slots.size(); ++i) {
    const auto& s = config.slots[i];
    const std::string path = absl::StrCat("world.slots[", i, "]");
    if (!website_ids.contains(s.website)) {
      return FieldError(absl::StrCat(path, ".website"),
                        absl::StrCat("unknown website '", s.website, "'"));
    }
    if (!(s.floor_price >= 0)) {
      return FieldError(absl::StrCat(path, ".floor_price"), "must be >= 0");
    }
    if (!(s.timeout > 0)) {
      return FieldError(absl::StrCat(path, ".timeout"), "must be > 0");
    }
    std::set<absl::string_view> in_slot;
    for (size_t t = 0; t < s.tiers.size(); ++t) {
      for (size_t j = 0; j < s.tiers[t].size(); ++j) {
        const std::string& a = s.tiers[t][j];
        const std::string tpath =
            absl::StrCat(path, ".tiers[", t, "][", j, "]");
        if (!adv_ids.contains(a)) {
          return FieldError(tpath, absl::StrCat("unknown advertiser '", a,
                                                "'"));
        }
        if (!in_slot.insert(a).second) {
          return FieldError(tpath, absl::StrCat("advertiser '", a,
                                                "' appears in two tiers"));
        }
      }
    }
  }
  std::set<std::pair<absl::string_view, absl::string_view>> sync_seen;
  for (size_t i = 0; i < config.sync_pairs.size(); ++i) {
    const auto& p = config.sync_pairs[i];
    const std::string path = absl::StrCat("world.sync_pairs[", i, "]");
    if (!tracker_ids.contains(p.initiator)) {
      return FieldError(absl::StrCat(path, ".initiator"),
                        absl::StrCat("unknown tracker '", p.initiator, "'"));
    }
    if (!tracker_ids.contains(p.receiver)) {
      return FieldError(absl::StrCat(path, ".receiver"),
                        absl::StrCat("unknown tracker '", p.receiver, "'"));
    }
    if (p.initiator == p.receiver) {
      return FieldError(path, "initiator and receiver must differ");
    }
    if (!sync_seen.emplace(p.initiator, p.receiver).second) {
      return FieldError(path, "duplicate sync pair");
    }
  }

  World world;
  world.seed_ = seed;
  world.groups_ = SortedById(config.groups);
  world.websites_ = SortedById(config.websites);
  world.trackers_ = SortedById(config.trackers);
  world.advertisers_ = SortedById(config.advertisers);
  world.slots_ = SortedById(config.slots);
  world.group_index_ = IndexById(world.groups_);
  world.website_index_ = IndexById(world.websites_);
  world.tracker_index_ = IndexById(world.trackers_);
  world.advertiser_index_ = IndexById(world.advertisers_);

  for (auto& t : world.trackers_) {
    std::sort(t.site_coverage.begin(), t.site_coverage.end());
    t.site_coverage.erase(
        std::unique(t.site_coverage.begin(), t.site_coverage.end()),
        t.site_coverage.end());
  }

  world.graph_.edges = config.edges;
  std::sort(world.graph_.edges.begin(), world.graph_.edges.end(),
            [](const SharingEdge& a, const SharingEdge& b) {
              return std::tie(a.tracker, a.advertiser) <
                     std::tie(b.tracker, b.advertiser);
            });
  world.sync_pairs_ = config.sync_pairs;
  std::sort(world.sync_pairs_.begin(), world.sync_pairs_.end(),
            [](const SyncPairConfig& a, const SyncPairConfig& b) {
              return std::tie(a.initiator, a.receiver) <
                     std::tie(b.initiator, b.receiver);
            });

  // Generic pool: configured generic tokens plus each group's shared slice.
  std::set<std::string> pool(config.generic_pool.begin(),
                             config.generic_pool.end());
  for (auto& g : world.groups_) {
    std::sort(g.vocabulary.begin(), g.vocabulary.end());
    g.vocabulary.erase(std::unique(g.vocabulary.begin(), g.vocabulary.end()),
                       g.vocabulary.end());
    const auto shared = static_cast<size_t>(
        std::llround(g.generic_overlap * static_cast<double>(g.vocabulary.size())));
    pool.insert(g.vocabulary.begin(), g.vocabulary.begin() + shared);
  }
  world.generic_pool_.assign(pool.begin(), pool.end());
  for (const auto& g : world.groups_) {
    std::vector<std::string> exclusive;
    for (const auto& tok : g.vocabulary) {
      if (!pool.contains(tok)) exclusive.push_back(tok);
    }
    world.exclusive_vocab_.push_back(std::move(exclusive));
  }

  world.incoming_.resize(world.advertisers_.size());
  for (size_t i = 0; i < world.graph_.edges.size(); ++i) {
    const auto a = *world.AdvertiserIndex(world.graph_.edges[i].advertiser);
    world.incoming_[a].push_back(i);
  }
  world.group_sites_.resize(world.groups_.size());
  for (size_t i = 0; i < world.websites_.size(); ++i) {
    const auto& w = world.websites_[i];
    if (!w.group.empty()) {
      world.group_sites_[*world.GroupIndex(w.group)].push_back(i);
    }
  }
  world.site_trackers_.resize(world.websites_.size());
  for (size_t t = 0; t < world.trackers_.size(); ++t) {
    for (const auto& site : world.trackers_[t].site_coverage) {
      world.site_trackers_[*world.WebsiteIndex(site)].push_back(t);
    }
  }
  return world;
}

std::string BlockingPersonaId(uint64_t mask, size_t num_trackers) {
  const uint64_t max_mask = num_trackers == 0 ? 0 : (uint64_t{1} << num_trackers) - 1;
  const size_t width = std::to_string(max_mask).size();
  std::string digits = std::to_string(mask);
  return absl::StrCat("p", std::string(width - std::min(width, digits.size()), '0'),
                      digits);
}

std::string ControlPersonaId(int index, int num_controls) {
  const size_t width = std::to_string(std::max(0, num_controls - 1)).size();
  std::string digits = std::to_string(index);
  return absl::StrCat("c", std::string(width - std::min(width, digits.size()), '0'),
                      digits);
}

absl::StatusOr<std::vector<Persona>> ResolvePersonas(const World& world,
                                                     const RunConfig& run) {
  std::vector<PersonaConfig> configs = run.personas;
  if (run.persona_plan.has_value()) {
    const PersonaPlan& plan = *run.persona_plan;
    if (!world.GroupIndex(plan.group)) {
      return FieldError("run.persona_plan.group",
                        absl::StrCat("unknown group '", plan.group, "'"));
    }
    if (plan.controls < 0) {
      return FieldError("run.persona_plan.controls", "must be >= 0");
    }
    const size_t k = world.trackers().size();
    const std::vector<std::string> ids = world.TrackerIds();
    for (uint64_t mask = 0; mask < (uint64_t{1} << k); ++mask) {
      PersonaConfig p{BlockingPersonaId(mask, k), plan.group, {}, false};
      for (size_t i = 0; i < k; ++i) {
        if ((mask >> i) & 1U) p.blocked.push_back(ids[i]);
      }
      configs.push_back(std::move(p));
    }
    for (int c = 0; c < plan.controls; ++c) {
      configs.push_back({ControlPersonaId(c, plan.controls), plan.group, {},
                         true});
    }
  }
  if (configs.empty()) {
    return FieldError("run.personas", "at least one persona required");
  }

  std::vector<Persona> out;
  std::set<absl::string_view> seen;
  for (size_t i = 0; i < configs.size(); ++i) {
    const auto& pc = configs[i];
    const std::string path = absl::StrCat("run.personas[", i, "]");
    if (pc.id.empty()) return FieldError(path + ".id", "must be non-empty");
    if (!seen.insert(pc.id).second) {
      return FieldError(path + ".id",
                        absl::StrCat("duplicate persona id '", pc.id, "'"));
    }
    if (!world.GroupIndex(pc.group)) {
      return FieldError(path + ".group",
                        absl::StrCat("unknown group '", pc.group, "'"));
    }
    if (pc.is_control && !pc.blocked.empty()) {
      return FieldError(path + ".blocked",
                        "control personas must not block trackers");
    }
    Persona p{pc.id, pc.group, {}, pc.is_control};
    for (size_t j = 0; j < pc.blocked.size(); ++j) {
      auto t = world.TrackerIndex(pc.blocked[j]);
      if (!t) {
        return FieldError(
            absl::StrCat(path, ".blocked[", j, "]"),
            absl::StrCat("unknown tracker '", pc.blocked[j], "'"));
      }
      p.blocking.mask |= uint64_t{1} << *t;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<uint8_t> ObserveTrackers(const World& world, const Persona& persona,
                                     Rng& rng) {
  const size_t group = *world.GroupIndex(persona.group);
  std::vector<uint8_t> observed(world.trackers().size(), 0);
  for (size_t site : world.GroupSites(group)) {
    for (size_t t : world.SiteTrackers(site)) {
      const bool seen = rng.Bernoulli(world.trackers()[t].observe_prob);
      if (seen && (persona.is_control || !persona.blocking.Blocks(t))) {
        observed[t] = 1;
      }
    }
  }
  return observed;
}

bool KnowledgeFromObservations(const World& world, size_t advertiser,
                               std::span<const uint8_t> observed, Rng& rng) {
  bool known = false;
  for (size_t e : world.IncomingEdges(advertiser)) {
    const SharingEdge& edge = world.graph().edges[e];
    const bool propagated = rng.Bernoulli(edge.reliability);
    if (propagated && observed[*world.TrackerIndex(edge.tracker)]) {
      known = true;
    }
  }
  return known;
}

absl::StatusOr<bool> KnowledgeState(absl::string_view advertiser,
                                    const Persona& persona, const World& world,
                                    Rng& rng) {
  auto a = world.AdvertiserIndex(advertiser);
  if (!a) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown advertiser '", advertiser, "'"));
  }
  if (!world.GroupIndex(persona.group)) {
    return absl::InvalidArgumentError(
        absl::StrCat("persona '", persona.id, "' has unknown group '",
                     persona.group, "'"));
  }
  const std::vector<uint8_t> observed = ObserveTrackers(world, persona, rng);
  return KnowledgeFromObservations(world, *a, observed, rng);
}

absl::StatusOr<AdCreative> GenerateCreative(const World& world,
                                            absl::string_view advertiser,
                                            bool known,
                                            const InterestGroup& group,
                                            Rng& rng) {
  auto a = world.AdvertiserIndex(advertiser);
  if (!a) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown advertiser '", advertiser, "'"));
  }
  const std::vector<std::string>& source =
      known ? group.vocabulary : world.generic_pool();
  if (source.empty()) {
    return absl::FailedPreconditionError(
        known ? absl::StrCat("group '", group.id, "' has an empty vocabulary")
              : std::string("generic pool is empty"));
  }
  AdCreative creative;
  creative.advertiser = std::string(advertiser);
  const int length = world.advertisers()[*a].creative_length;
  creative.tokens.reserve(length);
  for (int i = 0; i < length; ++i) {
    creative.tokens.push_back(source[rng.UniformIndex(source.size())]);
  }
  return creative;
}

absl::StatusOr<AuctionOutcome> AuctionRtb(
    const AuctionSlot& slot, std::span<const std::vector<Bid>> tiers) {
  for (const auto& tier : tiers) {
    for (const Bid& b : tier) {
      if (b.value < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("negative bid from '", b.advertiser, "'"));
      }
    }
  }
  AuctionOutcome outcome;
  for (const auto& tier : tiers) {
    const Bid* best = BestBid(tier);
    if (best != nullptr && best->value >= slot.floor_price) {
      outcome.winner = best->advertiser;
      outcome.price = best->value;
      break;
    }
  }
  return outcome;
}

absl::StatusOr<AuctionOutcome> AuctionHb(const AuctionSlot& slot,
                                         std::span<const Bid> bids,
                                         double timeout) {
  if (!(timeout > 0)) {
    return absl::InvalidArgumentError("timeout must be positive");
  }
  AuctionOutcome outcome;
  for (const Bid& b : bids) {
    if (b.latency < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("negative latency from '", b.advertiser, "'"));
    }
    if (b.value < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("negative bid from '", b.advertiser, "'"));
    }
    if (b.latency <= timeout) outcome.bid_log.push_back(b);
  }
  std::sort(outcome.bid_log.begin(), outcome.bid_log.end(),
            [](const Bid& a, const Bid& b) { return a.advertiser < b.advertiser; });
  const Bid* best = BestBid(outcome.bid_log);
  if (best != nullptr && best->value >= slot.floor_price) {
    outcome.winner = best->advertiser;
    outcome.price = best->value;
  }
  return outcome;
}

std::string MakeIdentifier(absl::string_view owner, absl::string_view user) {
  return absl::StrCat(owner, ":", user);
}

absl::string_view IdentifierOwner(absl::string_view identifier) {
  return identifier.substr(0, identifier.find(':'));
}

namespace {

// Redirect chains for one page visit. A tracker present on the page receives
// its own cookie; each configured sync partner is reached through a redirect
// that carries the initiator's uid.
void EmitPageChains(const World& world, const Persona& persona, int run,
                    size_t site, bool apply_blocking, int& chain,
                    std::vector<RequestLogEntry>& out) {
  const std::string& site_id = world.websites()[site].id;
  auto blocked = [&](size_t t) {
    return apply_blocking && !persona.is_control && persona.blocking.Blocks(t);
  };
  for (size_t t : world.SiteTrackers(site)) {
    if (blocked(t)) continue;
    const std::string& tracker = world.trackers()[t].id;
    RequestLogEntry first{run,         persona.id, chain, 0, site_id, tracker,
                          MakeIdentifier(tracker, persona.id), std::nullopt};
    bool synced = false;
    for (const auto& pair : world.sync_pairs()) {
      if (pair.initiator != tracker) continue;
      if (blocked(*world.TrackerIndex(pair.receiver))) continue;
      RequestLogEntry head = first;
      head.chain = chain;
      out.push_back(head);
      out.push_back({run, persona.id, chain, 1, tracker, pair.receiver,
                     MakeIdentifier(pair.receiver, persona.id),
                     MakeIdentifier(tracker, persona.id)});
      ++chain;
      synced = true;
    }
    if (!synced) {
      out.push_back(first);
      ++chain;
    }
  }
}

}  // namespace

absl::StatusOr<SimulationLogs> RunSimulation(const World& world,
                                             std::span<const Persona> personas,
                                             int runs, uint64_t seed) {
  if (runs < 1) return absl::InvalidArgumentError("runs must be >= 1");
  if (personas.empty()) {
    return absl::InvalidArgumentError("at least one persona required");
  }
  if (world.slots().empty()) {
    return absl::InvalidArgumentError(
        "world.slots: no ad-collection slots configured");
  }
  for (const Persona& p : personas) {
    if (!world.GroupIndex(p.group)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "persona '", p.id, "' has unknown group '", p.group, "'"));
    }
  }

  // Sites visited during collection, shared by every persona.
  std::set<size_t> collection_sites;
  for (const auto& slot : world.slots()) {
    collection_sites.insert(*world.WebsiteIndex(slot.website));
  }

  SimulationLogs logs;
  const size_t num_adv = world.advertisers().size();
  for (const Persona& persona : personas) {
    const InterestGroup& group = world.groups()[*world.GroupIndex(persona.group)];
    for (int run = 0; run < runs; ++run) {
      Rng rng(DeriveSeed(seed, "simulate",
                         {static_cast<uint64_t>(run), HashString(persona.id)}));
      const std::vector<uint8_t> observed =
          ObserveTrackers(world, persona, rng);
      std::vector<bool> known(num_adv);
      for (size_t a = 0; a < num_adv; ++a) {
        known[a] = KnowledgeFromObservations(world, a, observed, rng);
      }

      for (const AuctionSlot& slot : world.slots()) {
        std::vector<std::vector<std::string>> tiers = slot.tiers;
        if (tiers.empty()) tiers.push_back(world.AdvertiserIds());

        std::vector<std::vector<Bid>> tier_bids;
        for (const auto& tier : tiers) {
          std::vector<Bid> bids;
          for (const std::string& id : tier) {
            const size_t a = *world.AdvertiserIndex(id);
            const Advertiser& adv = world.advertisers()[a];
            const double value = DrawBid(adv, known[a], rng);
            const double latency = DrawLatency(adv, rng);
            bids.push_back({id, value, latency});
          }
          tier_bids.push_back(std::move(bids));
        }

        AuctionOutcome outcome;
        if (slot.mechanism == Mechanism::kRtbWaterfall) {
          ASSIGN_OR_RETURN(outcome, AuctionRtb(slot, tier_bids));
        } else {
          std::vector<Bid> flat;
          for (auto& tier : tier_bids) {
            flat.insert(flat.end(), tier.begin(), tier.end());
          }
          ASSIGN_OR_RETURN(outcome, AuctionHb(slot, flat, slot.timeout));
          if (slot.mechanism == Mechanism::kHbClient) {
            for (const Bid& b : outcome.bid_log) {
              logs.bids.push_back(
                  {run, persona.id, slot.id, b.advertiser, b.value, b.latency});
            }
          }
        }
        logs.outcomes.push_back(
            {run, persona.id, slot.id, outcome.winner, outcome.price});
        if (outcome.winner.has_value()) {
          const size_t a = *world.AdvertiserIndex(*outcome.winner);
          ASSIGN_OR_RETURN(AdCreative creative,
                           GenerateCreative(world, *outcome.winner, known[a],
                                            group, rng));
          logs.ads.push_back({run, persona.id, *outcome.winner, slot.id,
                              std::move(creative.tokens)});
        }
      }

      int chain = 0;
      for (size_t site : world.GroupSites(*world.GroupIndex(persona.group))) {
        EmitPageChains(world, persona, run, site, /*apply_blocking=*/true,
                       chain, logs.requests);
      }
      // Every tracker is unblocked while ads are collected.
      for (size_t site : collection_sites) {
        EmitPageChains(world, persona, run, site, /*apply_blocking=*/false,
                       chain, logs.requests);
      }
    }
  }

  std::sort(logs.ads.begin(), logs.ads.end(),
            [](const AdRecord& a, const AdRecord& b) {
              return std::tie(a.run, a.persona, a.slot) <
                     std::tie(b.run, b.persona, b.slot);
            });
  std::sort(logs.outcomes.begin(), logs.outcomes.end(),
            [](const OutcomeRecord& a, const OutcomeRecord& b) {
              return std::tie(a.run, a.persona, a.slot) <
                     std::tie(b.run, b.persona, b.slot);
            });
  std::sort(logs.bids.begin(), logs.bids.end(),
            [](const BidRecord& a, const BidRecord& b) {
              return std::tie(a.run, a.persona, a.slot, a.advertiser) <
                     std::tie(b.run, b.persona, b.slot, b.advertiser);
            });
  std::sort(logs.requests.begin(), logs.requests.end(),
            [](const RequestLogEntry& a, const RequestLogEntry& b) {
              return std::tie(a.run, a.persona, a.chain, a.chain_position) <
                     std::tie(b.run, b.persona, b.chain, b.chain_position);
            });
  return logs;
}

}  // namespace adtomo::ecosim
