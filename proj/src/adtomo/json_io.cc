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

#include "adtomo/json_io.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "adtomo/status_macros.h"

namespace adtomo::json_io {
namespace {

absl::Status Missing(absl::string_view field, absl::string_view type) {
  return absl::InvalidArgumentError(
      absl::StrCat(field, ": expected ", type));
}

absl::StatusOr<std::string> GetString(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) return Missing(field, "a string");
  return it->get<std::string>();
}

absl::StatusOr<int> GetInt(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_integer()) {
    return Missing(field, "an integer");
  }
  return it->get<int>();
}

absl::StatusOr<double> GetNumber(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number()) return Missing(field, "a number");
  return it->get<double>();
}

absl::StatusOr<std::optional<std::string>> GetOptionalString(
    const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::optional<std::string>();
  if (!it->is_string()) return Missing(field, "a string or null");
  return std::optional<std::string>(it->get<std::string>());
}

absl::StatusOr<std::vector<std::string>> GetStrings(const Json& j,
                                                    const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_array()) {
    return Missing(field, "an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) return Missing(field, "an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Json OptionalString(const std::optional<std::string>& s) {
  return s.has_value() ? Json(*s) : Json(nullptr);
}

Json NodeToJson(const forest::DecisionTree& tree, int index) {
  const forest::TreeNode& n = tree.nodes[index];
  Json j;
  if (n.is_leaf()) {
    j["leaf"] = true;
    j["label"] = n.label;
    j["count"] = n.count;
    return j;
  }
  j["leaf"] = false;
  j["feature"] = n.feature;
  j["count"] = n.count;
  j["gain"] = n.gain;
  j["absent"] = NodeToJson(tree, n.absent);
  j["present"] = NodeToJson(tree, n.present);
  return j;
}

}  // namespace

Json WorldToJson(const ecosim::World& world) {
  Json w;
  Json groups = Json::array();
  for (const auto& g : world.groups()) {
    groups.push_back({{"id", g.id},
                      {"vocabulary", g.vocabulary},
                      {"generic_overlap", g.generic_overlap}});
  }
  w["groups"] = groups;
  w["generic_pool"] = world.generic_pool();
  Json sites = Json::array();
  for (const auto& s : world.websites()) {
    sites.push_back({{"id", s.id}, {"group", s.group}});
  }
  w["websites"] = sites;
  Json trackers = Json::array();
  for (const auto& t : world.trackers()) {
    trackers.push_back({{"id", t.id},
                        {"site_coverage", t.site_coverage},
                        {"observe_prob", t.observe_prob}});
  }
  w["trackers"] = trackers;
  Json advertisers = Json::array();
  for (const auto& a : world.advertisers()) {
    advertisers.push_back({{"id", a.id},
                           {"base_bid", a.base_bid},
                           {"knowledge_boost", a.knowledge_boost},
                           {"bid_noise_sd", a.bid_noise_sd},
                           {"creative_length", a.creative_length},
                           {"latency_mean", a.latency_mean},
                           {"latency_sd", a.latency_sd}});
  }
  w["advertisers"] = advertisers;
  Json edges = Json::array();
  for (const auto& e : world.graph().edges) {
    edges.push_back({{"tracker", e.tracker},
                     {"advertiser", e.advertiser},
                     {"reliability", e.reliability}});
  }
  w["edges"] = edges;
  Json slots = Json::array();
  for (const auto& s : world.slots()) {
    slots.push_back({{"id", s.id},
                     {"website", s.website},
                     {"floor_price", s.floor_price},
                     {"mechanism", std::string(ecosim::MechanismName(s.mechanism))},
                     {"tiers", s.tiers},
                     {"timeout", s.timeout}});
  }
  w["slots"] = slots;
  Json sync = Json::array();
  for (const auto& p : world.sync_pairs()) {
    sync.push_back({{"initiator", p.initiator}, {"receiver", p.receiver}});
  }
  w["sync_pairs"] = sync;
  return w;
}

Json AdRecordToJson(const ecosim::AdRecord& r) {
  Json j;
  j["run"] = r.run;
  j["persona"] = r.persona;
  j["advertiser"] = r.advertiser;
  j["slot"] = r.slot;
  j["tokens"] = r.tokens;
  return j;
}

absl::StatusOr<ecosim::AdRecord> AdRecordFromJson(const Json& j) {
  ecosim::AdRecord r;
  ASSIGN_OR_RETURN(r.run, GetInt(j, "run"));
  ASSIGN_OR_RETURN(r.persona, GetString(j, "persona"));
  ASSIGN_OR_RETURN(r.advertiser, GetString(j, "advertiser"));
  ASSIGN_OR_RETURN(r.slot, GetString(j, "slot"));
  ASSIGN_OR_RETURN(r.tokens, GetStrings(j, "tokens"));
  return r;
}

Json RequestToJson(const ecosim::RequestLogEntry& r) {
  Json j;
  j["run"] = r.run;
  j["persona"] = r.persona;
  j["chain"] = r.chain;
  j["chain_position"] = r.chain_position;
  j["source_domain"] = r.source_domain;
  j["destination_domain"] = r.destination_domain;
  j["cookie_sent"] = OptionalString(r.cookie_sent);
  j["uid_param"] = OptionalString(r.uid_param);
  return j;
}

absl::StatusOr<ecosim::RequestLogEntry> RequestFromJson(const Json& j) {
  ecosim::RequestLogEntry r;
  ASSIGN_OR_RETURN(r.run, GetInt(j, "run"));
  ASSIGN_OR_RETURN(r.persona, GetString(j, "persona"));
  ASSIGN_OR_RETURN(r.chain, GetInt(j, "chain"));
  ASSIGN_OR_RETURN(r.chain_position, GetInt(j, "chain_position"));
  if (r.chain_position < 0) {
    return absl::InvalidArgumentError("chain_position: must be >= 0");
  }
  ASSIGN_OR_RETURN(r.source_domain, GetString(j, "source_domain"));
  ASSIGN_OR_RETURN(r.destination_domain, GetString(j, "destination_domain"));
  ASSIGN_OR_RETURN(r.cookie_sent, GetOptionalString(j, "cookie_sent"));
  ASSIGN_OR_RETURN(r.uid_param, GetOptionalString(j, "uid_param"));
  return r;
}

Json BidToJson(const ecosim::BidRecord& r) {
  Json j;
  j["run"] = r.run;
  j["persona"] = r.persona;
  j["slot"] = r.slot;
  j["advertiser"] = r.advertiser;
  j["bid"] = r.bid;
  j["latency"] = r.latency;
  return j;
}

absl::StatusOr<ecosim::BidRecord> BidFromJson(const Json& j) {
  ecosim::BidRecord r;
  ASSIGN_OR_RETURN(r.run, GetInt(j, "run"));
  ASSIGN_OR_RETURN(r.persona, GetString(j, "persona"));
  ASSIGN_OR_RETURN(r.slot, GetString(j, "slot"));
  ASSIGN_OR_RETURN(r.advertiser, GetString(j, "advertiser"));
  ASSIGN_OR_RETURN(r.bid, GetNumber(j, "bid"));
  ASSIGN_OR_RETURN(r.latency, GetNumber(j, "latency"));
  return r;
}

Json CorpusToJson(const textvec::Corpus& corpus) {
  Json j;
  j["size"] = corpus.size();
  j["tokens"] = corpus.tokens();
  return j;
}

absl::StatusOr<textvec::Corpus> CorpusFromJson(const Json& j) {
  ASSIGN_OR_RETURN(auto tokens, GetStrings(j, "tokens"));
  const size_t n = tokens.size();
  textvec::Corpus corpus(std::move(tokens));
  if (corpus.size() != n) {
    return absl::InvalidArgumentError("tokens: corpus tokens must be unique");
  }
  return corpus;
}

Json RecordToJson(const tomography::VectorRecord& r) {
  Json j;
  j["advertiser"] = r.advertiser;
  j["persona"] = r.persona;
  j["run"] = r.run;
  Json v = Json::array();
  for (const auto& [column, count] : r.vector.entries()) {
    v.push_back(Json::array({column, count}));
  }
  j["vector"] = v;
  j["is_different_from_control"] =
      r.is_different_from_control.has_value()
          ? Json(*r.is_different_from_control)
          : Json(nullptr);
  return j;
}

absl::StatusOr<tomography::VectorRecord> RecordFromJson(
    const Json& j, const textvec::Corpus& corpus) {
  tomography::VectorRecord r;
  ASSIGN_OR_RETURN(r.advertiser, GetString(j, "advertiser"));
  ASSIGN_OR_RETURN(r.persona, GetString(j, "persona"));
  ASSIGN_OR_RETURN(r.run, GetInt(j, "run"));
  auto v = j.find("vector");
  if (v == j.end() || !v->is_array()) {
    return Missing("vector", "an array of [column, count] pairs");
  }
  std::vector<textvec::CountVector::Entry> entries;
  for (const auto& e : *v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
        !e[1].is_number_unsigned()) {
      return Missing("vector", "an array of [column, count] pairs");
    }
    entries.emplace_back(e[0].get<uint32_t>(), e[1].get<uint64_t>());
  }
  ASSIGN_OR_RETURN(r.vector,
                   textvec::CountVector::FromEntries(corpus, std::move(entries)));
  auto flag = j.find("is_different_from_control");
  if (flag != j.end() && !flag->is_null()) {
    if (!flag->is_boolean()) {
      return Missing("is_different_from_control", "a boolean or null");
    }
    r.is_different_from_control = flag->get<bool>();
  }
  return r;
}

Json ParamsToJson(const forest::ForestParams& p) {
  Json j;
  j["n_trees"] = p.n_trees;
  j["max_depth"] = p.max_depth ? Json(*p.max_depth) : Json(nullptr);
  j["features_per_split"] =
      p.features_per_split == forest::FeaturesPerSplit::kSqrt ? "sqrt" : "all";
  j["min_leaf"] = p.min_leaf;
  return j;
}

Json ForestToJson(const forest::ForestModel& model) {
  Json j;
  j["params"] = ParamsToJson(model.params);
  j["seed"] = model.seed;
  j["num_features"] = model.num_features;
  Json trees = Json::array();
  for (const auto& tree : model.trees) trees.push_back(NodeToJson(tree, 0));
  j["trees"] = trees;
  return j;
}

Json SyncDetectionToJson(const syncdetect::SyncDetection& d) {
  auto pairs = [](const std::vector<syncdetect::SyncPair>& v) {
    Json out = Json::array();
    for (const auto& p : v) {
      Json ev = Json::array();
      for (const auto& e : p.evidence) {
        ev.push_back(Json::array({e.run, e.persona, e.chain_position}));
      }
      Json j;
      j["initiator"] = p.initiator;
      j["receiver"] = p.receiver;
      j["evidence_count"] = p.evidence.size();
      j["evidence"] = ev;
      out.push_back(j);
    }
    return out;
  };
  Json j;
  j["pairs"] = pairs(d.pairs);
  j["weak"] = pairs(d.weak);
  return j;
}

Json EvaluationToJson(const tomography::Evaluation& e) {
  Json j;
  j["precision"] = e.precision;
  j["recall"] = e.recall;
  j["true_positives"] = e.true_positives;
  j["false_positives"] = e.false_positives;
  j["false_negatives"] = e.false_negatives;
  return j;
}

}  // namespace adtomo::json_io
