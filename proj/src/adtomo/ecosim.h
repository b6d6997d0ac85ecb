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

// Synthetic behavioral-advertising ecosystem: interest groups, websites,
// tracker organizations, bidding advertisers, a planted tracker->advertiser
// sharing graph, and the auctions that turn knowledge into ad creatives.

#ifndef ADTOMO_ECOSIM_H_
#define ADTOMO_ECOSIM_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "adtomo/blocking.h"
#include "adtomo/rng.h"

namespace adtomo::ecosim {

struct InterestGroup {
  std::string id;
  std::vector<std::string> vocabulary;
  // Fraction of the vocabulary that is also part of the generic pool.
  double generic_overlap = 0.0;
};

struct Website {
  std::string id;
  // Interest group the site belongs to; empty for ad-collection-only sites.
  std::string group;
};

struct TrackerOrg {
  std::string id;
  std::vector<std::string> site_coverage;
  double observe_prob = 1.0;
};

struct Advertiser {
  std::string id;
  double base_bid = 1.0;
  double knowledge_boost = 0.0;
  double bid_noise_sd = 0.0;
  int creative_length = 1;
  // Bid response latency, used by header-bidding timeouts.
  double latency_mean = 0.0;
  double latency_sd = 0.0;
};

struct SharingEdge {
  std::string tracker;
  std::string advertiser;
  double reliability = 1.0;
};

struct SharingGraph {
  // Sorted by (tracker, advertiser).
  std::vector<SharingEdge> edges;

  bool Contains(absl::string_view tracker, absl::string_view advertiser) const;
};

enum class Mechanism { kRtbWaterfall, kHbClient, kHbServer };

absl::string_view MechanismName(Mechanism m);
std::optional<Mechanism> ParseMechanism(absl::string_view name);

struct AuctionSlot {
  std::string id;
  std::string website;
  double floor_price = 0.0;
  Mechanism mechanism = Mechanism::kRtbWaterfall;
  // SSP tiers in publisher preference order. Empty means every advertiser
  // bids in a single tier.
  std::vector<std::vector<std::string>> tiers;
  // Header-bidding timeout.
  double timeout = 1000.0;
};

struct SyncPairConfig {
  std::string initiator;
  std::string receiver;
};

struct WorldConfig {
  std::vector<InterestGroup> groups;
  std::vector<std::string> generic_pool;
  std::vector<Website> websites;
  std::vector<TrackerOrg> trackers;
  std::vector<Advertiser> advertisers;
  std::vector<SharingEdge> edges;
  std::vector<AuctionSlot> slots;
  std::vector<SyncPairConfig> sync_pairs;
};

struct PersonaConfig {
  std::string id;
  std::string group;
  std::vector<std::string> blocked;
  bool is_control = false;
};

// Generates one persona per subset of trackers plus `controls` control
// personas, all in `group`.
struct PersonaPlan {
  std::string group;
  int controls = 0;
};

struct RunConfig {
  std::vector<PersonaConfig> personas;
  std::optional<PersonaPlan> persona_plan;
  int runs = 1;
  uint64_t seed = 0;
};

struct SimConfig {
  WorldConfig world;
  RunConfig run;
};

struct Persona {
  std::string id;
  std::string group;
  BlockingConfig blocking;
  bool is_control = false;
};

// Validated, immutable world. All entity lists are sorted by id, which fixes
// tracker bit order and lowest-id tie breaking.
class World {
 public:
  const std::vector<InterestGroup>& groups() const { return groups_; }
  const std::vector<Website>& websites() const { return websites_; }
  const std::vector<TrackerOrg>& trackers() const { return trackers_; }
  const std::vector<Advertiser>& advertisers() const { return advertisers_; }
  const SharingGraph& graph() const { return graph_; }
  const std::vector<AuctionSlot>& slots() const { return slots_; }
  const std::vector<SyncPairConfig>& sync_pairs() const { return sync_pairs_; }
  const std::vector<std::string>& generic_pool() const { return generic_pool_; }
  uint64_t seed() const { return seed_; }

  std::vector<std::string> TrackerIds() const;
  std::vector<std::string> AdvertiserIds() const;

  std::optional<size_t> GroupIndex(absl::string_view id) const;
  std::optional<size_t> TrackerIndex(absl::string_view id) const;
  std::optional<size_t> AdvertiserIndex(absl::string_view id) const;
  std::optional<size_t> WebsiteIndex(absl::string_view id) const;

  // Vocabulary tokens of a group that never occur in the generic pool.
  const std::vector<std::string>& ExclusiveVocabulary(size_t group) const {
    return exclusive_vocab_[group];
  }
  // Indices into graph().edges of the edges ending at an advertiser.
  const std::vector<size_t>& IncomingEdges(size_t advertiser) const {
    return incoming_[advertiser];
  }
  // Websites a persona of the group visits while training.
  const std::vector<size_t>& GroupSites(size_t group) const {
    return group_sites_[group];
  }
  // Trackers present on a website.
  const std::vector<size_t>& SiteTrackers(size_t website) const {
    return site_trackers_[website];
  }

 private:
  friend absl::StatusOr<World> BuildWorld(const WorldConfig& config,
                                          uint64_t seed);

  std::vector<InterestGroup> groups_;
  std::vector<Website> websites_;
  std::vector<TrackerOrg> trackers_;
  std::vector<Advertiser> advertisers_;
  SharingGraph graph_;
  std::vector<AuctionSlot> slots_;
  std::vector<SyncPairConfig> sync_pairs_;
  std::vector<std::string> generic_pool_;
  std::vector<std::vector<std::string>> exclusive_vocab_;
  std::vector<std::vector<size_t>> incoming_;
  std::vector<std::vector<size_t>> group_sites_;
  std::vector<std::vector<size_t>> site_trackers_;
  std::map<std::string, size_t, std::less<>> group_index_;
  std::map<std::string, size_t, std::less<>> tracker_index_;
  std::map<std::string, size_t, std::less<>> advertiser_index_;
  std::map<std::string, size_t, std::less<>> website_index_;
  uint64_t seed_ = 0;
};

// Validates the configuration and freezes it into a World. Diagnostics name
// the offending field path, e.g. "world.edges[2].reliability".
absl::StatusOr<World> BuildWorld(const WorldConfig& config, uint64_t seed);
inline absl::StatusOr<World> BuildWorld(const SimConfig& config,
                                        uint64_t seed) {
  return BuildWorld(config.world, seed);
}

// Resolves persona configurations (explicit list, then plan) against a world.
absl::StatusOr<std::vector<Persona>> ResolvePersonas(const World& world,
                                                     const RunConfig& run);

// Persona id for a blocking mask, zero-padded so that lexicographic and
// numeric order agree.
std::string BlockingPersonaId(uint64_t mask, size_t num_trackers);
std::string ControlPersonaId(int index, int num_controls);

// Which trackers record the persona during training: the tracker must be
// unblocked, cover a visited site, and win an observe_prob draw there.
std::vector<uint8_t> ObserveTrackers(const World& world, const Persona& persona,
                                     Rng& rng);

// An advertiser learns the persona's interest if any incoming edge from an
// observing tracker passes its reliability draw.
bool KnowledgeFromObservations(const World& world, size_t advertiser,
                               std::span<const uint8_t> observed, Rng& rng);

absl::StatusOr<bool> KnowledgeState(absl::string_view advertiser,
                                    const Persona& persona, const World& world,
                                    Rng& rng);

struct AdCreative {
  std::string advertiser;
  std::vector<std::string> tokens;
  std::string slot;
  int run = 0;
};

// Targeted creatives draw from the group vocabulary, untargeted ones from
// the generic pool; tokens are uniform with replacement.
absl::StatusOr<AdCreative> GenerateCreative(const World& world,
                                            absl::string_view advertiser,
                                            bool known,
                                            const InterestGroup& group,
                                            Rng& rng);

struct Bid {
  std::string advertiser;
  double value = 0.0;
  double latency = 0.0;
};

struct AuctionOutcome {
  std::optional<std::string> winner;
  double price = 0.0;
  // On-time bids, sorted by advertiser id. Empty for waterfall auctions.
  std::vector<Bid> bid_log;
};

// Waterfall: the first tier whose best bid clears the floor sells the slot.
absl::StatusOr<AuctionOutcome> AuctionRtb(
    const AuctionSlot& slot, std::span<const std::vector<Bid>> tiers);

// Header bidding: every bid that arrives within `timeout` competes at once.
absl::StatusOr<AuctionOutcome> AuctionHb(const AuctionSlot& slot,
                                         std::span<const Bid> bids,
                                         double timeout);

struct AdRecord {
  int run = 0;
  std::string persona;
  std::string advertiser;
  std::string slot;
  std::vector<std::string> tokens;
};

struct RequestLogEntry {
  int run = 0;
  std::string persona;
  int chain = 0;
  int chain_position = 0;
  std::string source_domain;
  std::string destination_domain;
  std::optional<std::string> cookie_sent;
  std::optional<std::string> uid_param;
};

struct BidRecord {
  int run = 0;
  std::string persona;
  std::string slot;
  std::string advertiser;
  double bid = 0.0;
  double latency = 0.0;
};

struct OutcomeRecord {
  int run = 0;
  std::string persona;
  std::string slot;
  std::optional<std::string> winner;
  double price = 0.0;
};

struct SimulationLogs {
  std::vector<AdRecord> ads;
  std::vector<RequestLogEntry> requests;
  std::vector<BidRecord> bids;
  std::vector<OutcomeRecord> outcomes;
};

// Identifier carried in cookies and uid parameters: "<owner>:<user>".
std::string MakeIdentifier(absl::string_view owner, absl::string_view user);
absl::string_view IdentifierOwner(absl::string_view identifier);

// Simulates `runs` collection runs for every persona. Each (run, persona)
// owns a substream derived from `seed`, and the logs are canonically sorted,
// so persona order does not affect the output.
absl::StatusOr<SimulationLogs> RunSimulation(const World& world,
                                             std::span<const Persona> personas,
                                             int runs, uint64_t seed);

}  // namespace adtomo::ecosim

#endif  // ADTOMO_ECOSIM_H_
