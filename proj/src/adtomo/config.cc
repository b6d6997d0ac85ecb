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

#include <fstream>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "adtomo/status_macros.h"

namespace adtomo {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

absl::Status Invalid(absl::string_view path, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", message));
}

// A JSON object plus the path it was reached by.
class Object {
 public:
  Object(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  static absl::StatusOr<Object> Make(const Json& j, std::string path) {
    if (!j.is_object()) return Invalid(path, "expected an object");
    return Object(j, std::move(path));
  }

  std::string Path(absl::string_view key) const {
    return path_.empty() ? std::string(key) : absl::StrCat(path_, ".", key);
  }

  absl::Status AllowOnly(std::initializer_list<absl::string_view> keys) const {
    std::set<absl::string_view> allowed(keys);
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.contains(key)) return Invalid(Path(key), "unknown field");
    }
    return absl::OkStatus();
  }

  const Json* Find(absl::string_view key) const {
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  absl::Status Read(absl::string_view key, std::string& out,
                    bool required) const {
    const Json* v = Find(key);
    if (v == nullptr) {
      return required ? Invalid(Path(key), "required") : absl::OkStatus();
    }
    if (!v->is_string()) return Invalid(Path(key), "expected a string");
    out = v->get<std::string>();
    return absl::OkStatus();
  }

  absl::Status Read(absl::string_view key, double& out, bool required) const {
    const Json* v = Find(key);
    if (v == nullptr) {
      return required ? Invalid(Path(key), "required") : absl::OkStatus();
    }
    if (!v->is_number()) return Invalid(Path(key), "expected a number");
    out = v->get<double>();
    return absl::OkStatus();
  }

  absl::Status Read(absl::string_view key, int& out, bool required) const {
    const Json* v = Find(key);
    if (v == nullptr) {
      return required ? Invalid(Path(key), "required") : absl::OkStatus();
    }
    if (!v->is_number_integer()) {
      return Invalid(Path(key), "expected an integer");
    }
    out = v->get<int>();
    return absl::OkStatus();
  }

  absl::Status Read(absl::string_view key, uint64_t& out, bool required) const {
    const Json* v = Find(key);
    if (v == nullptr) {
      return required ? Invalid(Path(key), "required") : absl::OkStatus();
    }
    if (!v->is_number_unsigned() &&
        !(v->is_number_integer() && v->get<int64_t>() >= 0)) {
      return Invalid(Path(key), "expected a non-negative integer");
    }
    out = v->get<uint64_t>();
    return absl::OkStatus();
  }

  absl::Status Read(absl::string_view key, bool& out, bool required) const {
    const Json* v = Find(key);
    if (v == nullptr) {
      return required ? Invalid(Path(key), "required") : absl::OkStatus();
    }
    if (!v->is_boolean()) return Invalid(Path(key), "expected a boolean");
    out = v->get<bool>();
    return absl::OkStatus();
  }

  absl::Status Read(absl::string_view key, std::vector<std::string>& out,
                    bool required) const {
    const Json* v = Find(key);
    if (v == nullptr) {
      return required ? Invalid(Path(key), "required") : absl::OkStatus();
    }
    if (!v->is_array()) return Invalid(Path(key), "expected an array");
    out.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        return Invalid(absl::StrCat(Path(key), "[", i, "]"),
                       "expected a string");
      }
      out.push_back((*v)[i].get<std::string>());
    }
    return absl::OkStatus();
  }

  // Calls fn(Object) for every element of an array of objects.
  template <typename Fn>
  absl::Status ForEach(absl::string_view key, bool required, Fn fn) const {
    const Json* v = Find(key);
    if (v == nullptr) {
      return required ? Invalid(Path(key), "required") : absl::OkStatus();
    }
    if (!v->is_array()) return Invalid(Path(key), "expected an array");
    for (size_t i = 0; i < v->size(); ++i) {
      ASSIGN_OR_RETURN(Object item,
                       Make((*v)[i], absl::StrCat(Path(key), "[", i, "]")));
      RETURN_IF_ERROR(fn(item));
    }
    return absl::OkStatus();
  }

 private:
  const Json& j_;
  std::string path_;
};

absl::StatusOr<ecosim::WorldConfig> ParseWorld(const Object& w) {
  ecosim::WorldConfig c;
  RETURN_IF_ERROR(w.AllowOnly({"groups", "generic_pool", "websites", "trackers",
                               "advertisers", "edges", "slots", "sync_pairs"}));
  RETURN_IF_ERROR(w.ForEach("groups", true, [&](const Object& o) {
    ecosim::InterestGroup g;
    RETURN_IF_ERROR(o.AllowOnly({"id", "vocabulary", "generic_overlap"}));
    RETURN_IF_ERROR(o.Read("id", g.id, true));
    RETURN_IF_ERROR(o.Read("vocabulary", g.vocabulary, true));
    RETURN_IF_ERROR(o.Read("generic_overlap", g.generic_overlap, false));
    c.groups.push_back(std::move(g));
    return absl::OkStatus();
  }));
  RETURN_IF_ERROR(w.Read("generic_pool", c.generic_pool, false));
  RETURN_IF_ERROR(w.ForEach("websites", true, [&](const Object& o) {
    ecosim::Website s;
    RETURN_IF_ERROR(o.AllowOnly({"id", "group"}));
    RETURN_IF_ERROR(o.Read("id", s.id, true));
    RETURN_IF_ERROR(o.Read("group", s.group, false));
    c.websites.push_back(std::move(s));
    return absl::OkStatus();
  }));
  RETURN_IF_ERROR(w.ForEach("trackers", true, [&](const Object& o) {
    ecosim::TrackerOrg t;
    RETURN_IF_ERROR(o.AllowOnly({"id", "site_coverage", "observe_prob"}));
    RETURN_IF_ERROR(o.Read("id", t.id, true));
    RETURN_IF_ERROR(o.Read("site_coverage", t.site_coverage, false));
    RETURN_IF_ERROR(o.Read("observe_prob", t.observe_prob, false));
    c.trackers.push_back(std::move(t));
    return absl::OkStatus();
  }));
  RETURN_IF_ERROR(w.ForEach("advertisers", true, [&](const Object& o) {
    ecosim::Advertiser a;
    RETURN_IF_ERROR(o.AllowOnly({"id", "base_bid", "knowledge_boost",
                                 "bid_noise_sd", "creative_length",
                                 "latency_mean", "latency_sd"}));
    RETURN_IF_ERROR(o.Read("id", a.id, true));
    RETURN_IF_ERROR(o.Read("base_bid", a.base_bid, false));
    RETURN_IF_ERROR(o.Read("knowledge_boost", a.knowledge_boost, false));
    RETURN_IF_ERROR(o.Read("bid_noise_sd", a.bid_noise_sd, false));
    RETURN_IF_ERROR(o.Read("creative_length", a.creative_length, false));
    RETURN_IF_ERROR(o.Read("latency_mean", a.latency_mean, false));
    RETURN_IF_ERROR(o.Read("latency_sd", a.latency_sd, false));
    c.advertisers.push_back(std::move(a));
    return absl::OkStatus();
  }));
  RETURN_IF_ERROR(w.ForEach("edges", false, [&](const Object& o) {
    ecosim::SharingEdge e;
    RETURN_IF_ERROR(o.AllowOnly({"tracker", "advertiser", "reliability"}));
    RETURN_IF_ERROR(o.Read("tracker", e.tracker, true));
    RETURN_IF_ERROR(o.Read("advertiser", e.advertiser, true));
    RETURN_IF_ERROR(o.Read("reliability", e.reliability, false));
    c.edges.push_back(std::move(e));
    return absl::OkStatus();
  }));
  RETURN_IF_ERROR(w.ForEach("slots", true, [&](const Object& o) {
    ecosim::AuctionSlot s;
    RETURN_IF_ERROR(o.AllowOnly(
        {"id", "website", "floor_price", "mechanism", "tiers", "timeout"}));
    RETURN_IF_ERROR(o.Read("id", s.id, true));
    RETURN_IF_ERROR(o.Read("website", s.website, true));
    RETURN_IF_ERROR(o.Read("floor_price", s.floor_price, false));
    std::string mechanism = "rtb_waterfall";
    RETURN_IF_ERROR(o.Read("mechanism", mechanism, false));
    auto m = ecosim::ParseMechanism(mechanism);
    if (!m) {
      return Invalid(o.Path("mechanism"),
                     "expected rtb_waterfall, hb_client or hb_server");
    }
    s.mechanism = *m;
    if (const Json* tiers = o.Find("tiers")) {
      if (!tiers->is_array()) return Invalid(o.Path("tiers"), "expected an array");
      for (size_t t = 0; t < tiers->size(); ++t) {
        const Json& tier = (*tiers)[t];
        const std::string tpath = absl::StrCat(o.Path("tiers"), "[", t, "]");
        if (!tier.is_array()) return Invalid(tpath, "expected an array");
        std::vector<std::string> ids;
        for (size_t k = 0; k < tier.size(); ++k) {
          if (!tier[k].is_string()) {
            return Invalid(absl::StrCat(tpath, "[", k, "]"),
                           "expected an advertiser id");
          }
          ids.push_back(tier[k].get<std::string>());
        }
        s.tiers.push_back(std::move(ids));
      }
    }
    RETURN_IF_ERROR(o.Read("timeout", s.timeout, false));
    c.slots.push_back(std::move(s));
    return absl::OkStatus();
  }));
  RETURN_IF_ERROR(w.ForEach("sync_pairs", false, [&](const Object& o) {
    ecosim::SyncPairConfig p;
    RETURN_IF_ERROR(o.AllowOnly({"initiator", "receiver"}));
    RETURN_IF_ERROR(o.Read("initiator", p.initiator, true));
    RETURN_IF_ERROR(o.Read("receiver", p.receiver, true));
    c.sync_pairs.push_back(std::move(p));
    return absl::OkStatus();
  }));
  return c;
}

absl::StatusOr<ecosim::RunConfig> ParseRun(const Object& r,
                                           bool& seed_present) {
  ecosim::RunConfig c;
  RETURN_IF_ERROR(r.AllowOnly({"personas", "persona_plan", "runs", "seed"}));
  RETURN_IF_ERROR(r.ForEach("personas", false, [&](const Object& o) {
    ecosim::PersonaConfig p;
    RETURN_IF_ERROR(o.AllowOnly({"id", "group", "blocked", "is_control"}));
    RETURN_IF_ERROR(o.Read("id", p.id, true));
    RETURN_IF_ERROR(o.Read("group", p.group, true));
    RETURN_IF_ERROR(o.Read("blocked", p.blocked, false));
    RETURN_IF_ERROR(o.Read("is_control", p.is_control, false));
    c.personas.push_back(std::move(p));
    return absl::OkStatus();
  }));
  if (const Json* plan = r.Find("persona_plan")) {
    ASSIGN_OR_RETURN(Object o, Object::Make(*plan, r.Path("persona_plan")));
    RETURN_IF_ERROR(o.AllowOnly({"group", "controls"}));
    ecosim::PersonaPlan p;
    RETURN_IF_ERROR(o.Read("group", p.group, true));
    RETURN_IF_ERROR(o.Read("controls", p.controls, false));
    if (p.controls < 0) return Invalid(o.Path("controls"), "must be >= 0");
    c.persona_plan = p;
  }
  if (c.personas.empty() && !c.persona_plan.has_value()) {
    return Invalid(r.Path("personas"),
                   "personas or persona_plan is required");
  }
  RETURN_IF_ERROR(r.Read("runs", c.runs, true));
  if (c.runs < 1) return Invalid(r.Path("runs"), "must be >= 1");
  seed_present = r.Find("seed") != nullptr;
  RETURN_IF_ERROR(r.Read("seed", c.seed, false));
  return c;
}

absl::StatusOr<forest::HyperGrid> ParseGrid(const Object& g) {
  forest::HyperGrid grid = forest::HyperGrid::Default();
  RETURN_IF_ERROR(
      g.AllowOnly({"n_trees", "max_depth", "features_per_split", "min_leaf"}));
  auto int_list = [&](absl::string_view key,
                      std::vector<int>& out) -> absl::Status {
    const Json* v = g.Find(key);
    if (v == nullptr) return absl::OkStatus();
    if (!v->is_array() || v->empty()) {
      return Invalid(g.Path(key), "expected a non-empty array");
    }
    out.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number_integer() || (*v)[i].get<int>() < 1) {
        return Invalid(absl::StrCat(g.Path(key), "[", i, "]"),
                       "expected a positive integer");
      }
      out.push_back((*v)[i].get<int>());
    }
    return absl::OkStatus();
  };
  RETURN_IF_ERROR(int_list("n_trees", grid.n_trees));
  RETURN_IF_ERROR(int_list("min_leaf", grid.min_leaf));
  if (const Json* v = g.Find("max_depth")) {
    if (!v->is_array() || v->empty()) {
      return Invalid(g.Path("max_depth"), "expected a non-empty array");
    }
    grid.max_depth.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      const Json& d = (*v)[i];
      if (d.is_null()) {
        grid.max_depth.push_back(std::nullopt);
      } else if (d.is_number_integer() && d.get<int>() >= 1) {
        grid.max_depth.push_back(d.get<int>());
      } else {
        return Invalid(absl::StrCat(g.Path("max_depth"), "[", i, "]"),
                       "expected a positive integer or null (unbounded)");
      }
    }
  }
  if (const Json* v = g.Find("features_per_split")) {
    if (!v->is_array() || v->empty()) {
      return Invalid(g.Path("features_per_split"), "expected a non-empty array");
    }
    grid.features_per_split.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      const Json& f = (*v)[i];
      if (f == "sqrt") {
        grid.features_per_split.push_back(forest::FeaturesPerSplit::kSqrt);
      } else if (f == "all") {
        grid.features_per_split.push_back(forest::FeaturesPerSplit::kAll);
      } else {
        return Invalid(absl::StrCat(g.Path("features_per_split"), "[", i, "]"),
                       "expected \"sqrt\" or \"all\"");
      }
    }
  }
  return grid;
}

}  // namespace

absl::StatusOr<ecosim::SimConfig> ParseSimConfig(const Json& j) {
  ASSIGN_OR_RETURN(Object root, Object::Make(j, ""));
  const Json* world = root.Find("world");
  if (world == nullptr) return Invalid("world", "required");
  const Json* run = root.Find("run");
  if (run == nullptr) return Invalid("run", "required");
  ecosim::SimConfig config;
  ASSIGN_OR_RETURN(Object w, Object::Make(*world, "world"));
  ASSIGN_OR_RETURN(config.world, ParseWorld(w));
  ASSIGN_OR_RETURN(Object r, Object::Make(*run, "run"));
  bool seed_present = false;
  ASSIGN_OR_RETURN(config.run, ParseRun(r, seed_present));
  return config;
}

absl::StatusOr<PipelineConfig> ParsePipelineConfig(const Json& j) {
  ASSIGN_OR_RETURN(Object root, Object::Make(j, ""));
  RETURN_IF_ERROR(root.AllowOnly({"world", "run", "stats", "grid", "folds",
                                  "holdout_runs", "accuracy_threshold", "seed",
                                  "output_dir"}));
  PipelineConfig config;
  const Json* world = root.Find("world");
  if (world == nullptr) return Invalid("world", "required");
  const Json* run = root.Find("run");
  if (run == nullptr) return Invalid("run", "required");
  ASSIGN_OR_RETURN(Object w, Object::Make(*world, "world"));
  ASSIGN_OR_RETURN(config.sim.world, ParseWorld(w));
  ASSIGN_OR_RETURN(Object r, Object::Make(*run, "run"));
  bool run_seed_present = false;
  ASSIGN_OR_RETURN(config.sim.run, ParseRun(r, run_seed_present));

  if (const Json* s = root.Find("stats")) {
    ASSIGN_OR_RETURN(Object o, Object::Make(*s, "stats"));
    RETURN_IF_ERROR(o.AllowOnly({"alpha", "min_expected"}));
    RETURN_IF_ERROR(o.Read("alpha", config.stats.alpha, false));
    RETURN_IF_ERROR(o.Read("min_expected", config.stats.min_expected, false));
  }
  if (const Json* g = root.Find("grid")) {
    ASSIGN_OR_RETURN(Object o, Object::Make(*g, "grid"));
    ASSIGN_OR_RETURN(config.grid, ParseGrid(o));
  }
  RETURN_IF_ERROR(root.Read("folds", config.folds, false));
  RETURN_IF_ERROR(root.Read("holdout_runs", config.holdout_runs, false));
  RETURN_IF_ERROR(
      root.Read("accuracy_threshold", config.accuracy_threshold, false));
  RETURN_IF_ERROR(root.Read("output_dir", config.output_dir, false));
  const bool seed_present = root.Find("seed") != nullptr;
  RETURN_IF_ERROR(root.Read("seed", config.seed, false));
  if (seed_present && run_seed_present && config.seed != config.sim.run.seed) {
    return Invalid("seed", "conflicts with run.seed; give one master seed");
  }
  if (!seed_present) config.seed = config.sim.run.seed;
  config.sim.run.seed = config.seed;

  RETURN_IF_ERROR(ValidatePipelineConfig(config));
  return config;
}

absl::StatusOr<PipelineConfig> ParsePipelineConfigText(absl::string_view text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError("config: not valid JSON");
  }
  return ParsePipelineConfig(j);
}

absl::StatusOr<PipelineConfig> LoadPipelineConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open config '", path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParsePipelineConfigText(buffer.str());
}

absl::Status ValidatePipelineConfig(const PipelineConfig& config) {
  RETURN_IF_ERROR(stats::ValidateStatConfig(config.stats));
  RETURN_IF_ERROR(config.grid.Validate());
  const int runs = config.sim.run.runs;
  if (config.holdout_runs < 0 || config.holdout_runs >= runs) {
    return Invalid("holdout_runs",
                   absl::StrCat("must be in [0, run.runs) = [0, ", runs,
                                "), got ", config.holdout_runs));
  }
  if (config.folds < 2) return Invalid("folds", "must be >= 2");
  const int cv_runs = runs - config.holdout_runs;
  if (cv_runs % config.folds != 0) {
    return Invalid("folds",
                   absl::StrCat(config.folds,
                                " does not divide run.runs - holdout_runs = ",
                                cv_runs));
  }
  if (!(config.accuracy_threshold > 0.0 && config.accuracy_threshold <= 1.0)) {
    return Invalid("accuracy_threshold", "must be in (0,1]");
  }
  if (config.output_dir.empty()) return Invalid("output_dir", "must be non-empty");
  return absl::OkStatus();
}

void SetSeed(PipelineConfig& config, uint64_t seed) {
  config.seed = seed;
  config.sim.run.seed = seed;
}

OrderedJson SimConfigToJson(const ecosim::SimConfig& config) {
  OrderedJson j;
  OrderedJson w;
  const ecosim::WorldConfig& c = config.world;
  w["groups"] = OrderedJson::array();
  for (const auto& g : c.groups) {
    w["groups"].push_back({{"id", g.id},
                           {"vocabulary", g.vocabulary},
                           {"generic_overlap", g.generic_overlap}});
  }
  w["generic_pool"] = c.generic_pool;
  w["websites"] = OrderedJson::array();
  for (const auto& s : c.websites) {
    OrderedJson site{{"id", s.id}};
    if (!s.group.empty()) site["group"] = s.group;
    w["websites"].push_back(site);
  }
  w["trackers"] = OrderedJson::array();
  for (const auto& t : c.trackers) {
    w["trackers"].push_back({{"id", t.id},
                             {"site_coverage", t.site_coverage},
                             {"observe_prob", t.observe_prob}});
  }
  w["advertisers"] = OrderedJson::array();
  for (const auto& a : c.advertisers) {
    w["advertisers"].push_back({{"id", a.id},
                                {"base_bid", a.base_bid},
                                {"knowledge_boost", a.knowledge_boost},
                                {"bid_noise_sd", a.bid_noise_sd},
                                {"creative_length", a.creative_length},
                                {"latency_mean", a.latency_mean},
                                {"latency_sd", a.latency_sd}});
  }
  w["edges"] = OrderedJson::array();
  for (const auto& e : c.edges) {
    w["edges"].push_back({{"tracker", e.tracker},
                          {"advertiser", e.advertiser},
                          {"reliability", e.reliability}});
  }
  w["slots"] = OrderedJson::array();
  for (const auto& s : c.slots) {
    OrderedJson slot{{"id", s.id},
                     {"website", s.website},
                     {"floor_price", s.floor_price},
                     {"mechanism", std::string(ecosim::MechanismName(s.mechanism))}};
    if (!s.tiers.empty()) slot["tiers"] = s.tiers;
    slot["timeout"] = s.timeout;
    w["slots"].push_back(slot);
  }
  w["sync_pairs"] = OrderedJson::array();
  for (const auto& p : c.sync_pairs) {
    w["sync_pairs"].push_back(
        {{"initiator", p.initiator}, {"receiver", p.receiver}});
  }
  j["world"] = w;

  OrderedJson r;
  if (!config.run.personas.empty()) {
    r["personas"] = OrderedJson::array();
    for (const auto& p : config.run.personas) {
      r["personas"].push_back({{"id", p.id},
                               {"group", p.group},
                               {"blocked", p.blocked},
                               {"is_control", p.is_control}});
    }
  }
  if (config.run.persona_plan.has_value()) {
    r["persona_plan"] = {{"group", config.run.persona_plan->group},
                         {"controls", config.run.persona_plan->controls}};
  }
  r["runs"] = config.run.runs;
  r["seed"] = config.run.seed;
  j["run"] = r;
  return j;
}

OrderedJson PipelineConfigToJson(const PipelineConfig& config) {
  OrderedJson j = SimConfigToJson(config.sim);
  j["stats"] = {{"alpha", config.stats.alpha},
                {"min_expected", config.stats.min_expected}};
  OrderedJson depths = OrderedJson::array();
  for (const auto& d : config.grid.max_depth) {
    depths.push_back(d ? OrderedJson(*d) : OrderedJson(nullptr));
  }
  OrderedJson fps = OrderedJson::array();
  for (auto f : config.grid.features_per_split) {
    fps.push_back(f == forest::FeaturesPerSplit::kSqrt ? "sqrt" : "all");
  }
  j["grid"] = {{"n_trees", config.grid.n_trees},
               {"max_depth", depths},
               {"features_per_split", fps},
               {"min_leaf", config.grid.min_leaf}};
  j["folds"] = config.folds;
  j["holdout_runs"] = config.holdout_runs;
  j["accuracy_threshold"] = config.accuracy_threshold;
  j["seed"] = config.seed;
  j["output_dir"] = config.output_dir;
  return j;
}

}  // namespace adtomo
