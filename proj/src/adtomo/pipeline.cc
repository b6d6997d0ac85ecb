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

#include "adtomo/pipeline.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "adtomo/json_io.h"
#include "adtomo/log.h"
#include "adtomo/status_macros.h"

namespace adtomo {
namespace {

namespace fs = std::filesystem;
using json_io::Json;

constexpr char kWorld[] = "world.json";
constexpr char kAdLog[] = "adlog.jsonl";
constexpr char kRequestLog[] = "requestlog.jsonl";
constexpr char kBidLog[] = "bidlog.jsonl";
constexpr char kSyncPairs[] = "syncpairs.json";
constexpr char kCorpus[] = "corpus.json";
constexpr char kRecords[] = "records.jsonl";
constexpr char kControlRecords[] = "control_records.jsonl";
constexpr char kReportJson[] = "report.json";
constexpr char kReportCsv[] = "report.csv";
constexpr char kEvaluation[] = "evaluation.json";
constexpr char kH1Json[] = "h1.json";
constexpr char kH1Csv[] = "h1.csv";

absl::Status WriteFile(const std::string& dir, const char* name,
                       const std::string& content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create directory '", dir, "': ", ec.message()));
  }
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("cannot write '", path, "'"));
  }
  out << content;
  out.close();
  if (!out) {
    return absl::UnavailableError(absl::StrCat("write failed for '", path, "'"));
  }
  Log(LogLevel::kInfo, absl::StrCat("wrote ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::string& dir, const char* name) {
  const std::string path = (fs::path(dir) / name).string();
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot read '", path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Parse errors in an artifact are reported with its file name.
absl::Status InFile(const char* name, const absl::Status& status) {
  return absl::Status(status.code(),
                      absl::StrCat(name, ": ", status.message()));
}

template <typename T, typename Fn>
std::string ToJsonl(std::span<const T> items, Fn to_json) {
  std::ostringstream out;
  json_io::WriteJsonl(out, items, to_json);
  return out.str();
}

template <typename T, typename Fn>
absl::StatusOr<std::vector<T>> FromJsonl(const std::string& dir,
                                         const char* name, Fn from_json) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(dir, name));
  std::istringstream in(text);
  auto items = json_io::ReadJsonl<T>(in, from_json);
  if (!items.ok()) return InFile(name, items.status());
  return items;
}

absl::StatusOr<Json> ParseJsonFile(const std::string& dir, const char* name) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(dir, name));
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(name, ": invalid JSON"));
  }
  return j;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

std::string FormatReal(double v) { return absl::StrFormat("%.6f", v); }

std::vector<std::string> PersonaIds(std::span<const ecosim::Persona> personas) {
  std::vector<std::string> ids;
  for (const auto& p : personas) ids.push_back(p.id);
  return ids;
}

absl::StatusOr<std::vector<tomography::VectorRecord>> ReadRecords(
    const std::string& dir, const char* name, const textvec::Corpus& corpus) {
  return FromJsonl<tomography::VectorRecord>(
      dir, name, [&](const Json& j) { return json_io::RecordFromJson(j, corpus); });
}

Json ReportToJson(const PipelineConfig& config, const ecosim::World& world,
                  const InferenceArtifacts& inference) {
  const std::vector<std::string> trackers = world.TrackerIds();
  Json j;
  j["config"] = PipelineConfigToJson(config);
  // The artifact location does not affect results; keep reports comparable.
  j["config"].erase("output_dir");
  j["notes"] = {
      {"tests", "chi-square and Welch t p-values are two-sided"},
      {"gains",
       "information gains are normalized to sum to 1 per advertiser"},
      {"folds", "cross-validation folds are stratified by persona"},
      {"gate",
       "holdout accuracy gates inference; cv accuracy is used when no runs "
       "are held out"},
      {"rule", "a tracker is inferred when its gain exceeds mean + 1 "
               "population standard deviation"}};
  j["trackers"] = trackers;
  j["holdout_runs"] = inference.holdout_runs;
  Json rows = Json::array();
  for (const auto& r : inference.rows) {
    Json row;
    row["advertiser"] = r.advertiser;
    row["best_params"] = json_io::ParamsToJson(r.best_params);
    row["cv_accuracy"] = r.cv_accuracy;
    row["holdout_accuracy"] =
        r.holdout_accuracy ? Json(*r.holdout_accuracy) : Json(nullptr);
    row["cv_records"] = r.cv_records;
    row["cv_flagged"] = r.cv_flagged;
    row["holdout_records"] = r.holdout_records;
    Json gains = Json::array();
    for (size_t t = 0; t < trackers.size(); ++t) {
      const bool inferred =
          std::find(r.inferred.begin(), r.inferred.end(), trackers[t]) !=
          r.inferred.end();
      gains.push_back(
          {{"tracker", trackers[t]},
           {"gain", r.importance[t]},
           {"inferred", inferred},
           {"in_ground_truth", world.graph().Contains(trackers[t], r.advertiser)}});
    }
    row["gains"] = gains;
    row["inferred"] = r.inferred;
    rows.push_back(row);
  }
  j["advertisers"] = rows;
  Json edges = Json::array();
  for (const auto& e : tomography::InferredEdges(inference.rows)) {
    edges.push_back({{"tracker", e.tracker}, {"advertiser", e.advertiser}});
  }
  j["inferred_edges"] = edges;
  return j;
}

std::string ReportToCsv(const ecosim::World& world,
                        const InferenceArtifacts& inference) {
  const std::vector<std::string> trackers = world.TrackerIds();
  std::string out =
      "advertiser,cv_accuracy,holdout_accuracy,tracker,gain,inferred,"
      "in_ground_truth\n";
  for (const auto& r : inference.rows) {
    for (size_t t = 0; t < trackers.size(); ++t) {
      const bool inferred =
          std::find(r.inferred.begin(), r.inferred.end(), trackers[t]) !=
          r.inferred.end();
      absl::StrAppend(
          &out, r.advertiser, ",", FormatReal(r.cv_accuracy), ",",
          r.holdout_accuracy ? FormatReal(*r.holdout_accuracy) : "", ",",
          trackers[t], ",", FormatReal(r.importance[t]), ",",
          inferred ? "true" : "false", ",",
          world.graph().Contains(trackers[t], r.advertiser) ? "true" : "false",
          "\n");
    }
  }
  return out;
}

Json EvaluationReport(const tomography::Evaluation& e,
                      std::span<const tomography::Edge> inferred,
                      const ecosim::World& world) {
  Json j = json_io::EvaluationToJson(e);
  Json inferred_json = Json::array();
  for (const auto& edge : inferred) {
    inferred_json.push_back(
        {{"tracker", edge.tracker}, {"advertiser", edge.advertiser}});
  }
  Json truth = Json::array();
  for (const auto& edge : world.graph().edges) {
    truth.push_back({{"tracker", edge.tracker},
                     {"advertiser", edge.advertiser},
                     {"reliability", edge.reliability}});
  }
  j["inferred_edges"] = inferred_json;
  j["ground_truth"] = truth;
  return j;
}

absl::StatusOr<std::vector<tomography::Edge>> EdgesFromReport(const Json& j) {
  auto it = j.find("inferred_edges");
  if (it == j.end() || !it->is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat(kReportJson, ": inferred_edges: expected an array"));
  }
  std::vector<tomography::Edge> edges;
  for (size_t i = 0; i < it->size(); ++i) {
    const Json& e = (*it)[i];
    if (!e.is_object() || !e.contains("tracker") || !e["tracker"].is_string() ||
        !e.contains("advertiser") || !e["advertiser"].is_string()) {
      return absl::InvalidArgumentError(absl::StrCat(
          kReportJson, ": inferred_edges[", i,
          "]: expected {tracker, advertiser} strings"));
    }
    edges.push_back({e["tracker"].get<std::string>(),
                     e["advertiser"].get<std::string>()});
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::string H1ToCsv(const tomography::H1Result& h1) {
  std::string out = "group";
  for (const auto& g : h1.groups) absl::StrAppend(&out, ",", g);
  out += "\n";
  for (size_t i = 0; i < h1.groups.size(); ++i) {
    out += h1.groups[i];
    for (size_t k = 0; k < h1.groups.size(); ++k) {
      absl::StrAppend(&out, ",", FormatReal(h1.mean_similarity[i][k]));
    }
    out += "\n";
  }
  return out;
}

Json H1ToJson(const tomography::H1Result& h1) {
  Json j;
  j["groups"] = h1.groups;
  j["mean_similarity"] = h1.mean_similarity;
  Json tests = Json::array();
  for (size_t i = 0; i < h1.groups.size(); ++i) {
    for (size_t k = 0; k < h1.groups.size(); ++k) {
      if (i == k) continue;
      Json t{{"group", h1.groups[i]}, {"versus", h1.groups[k]}};
      if (const auto& r = h1.tests[i][k]) {
        t["statistic"] = r->statistic;
        t["df"] = r->df;
        t["p_value"] = r->p_value;
        t["degenerate"] = r->degenerate;
      } else {
        t["statistic"] = nullptr;
        t["df"] = nullptr;
        t["p_value"] = nullptr;
        t["degenerate"] = true;
      }
      tests.push_back(t);
    }
  }
  j["tests"] = tests;
  j["notes"] = "Welch t-tests of within-group against across-group "
               "similarities; p-values are two-sided";
  return j;
}

}  // namespace

absl::StatusOr<SimulationArtifacts> SimulateStage(const PipelineConfig& config) {
  SimulationArtifacts out;
  ASSIGN_OR_RETURN(out.world, ecosim::BuildWorld(config.sim, config.seed));
  ASSIGN_OR_RETURN(out.personas,
                   ecosim::ResolvePersonas(out.world, config.sim.run));
  ASSIGN_OR_RETURN(out.logs,
                   ecosim::RunSimulation(out.world, out.personas,
                                         config.sim.run.runs, config.seed));
  return out;
}

absl::StatusOr<FlagArtifacts> FlagStage(
    const PipelineConfig& config, const ecosim::World& world,
    std::span<const ecosim::Persona> personas,
    std::span<const ecosim::AdRecord> ads) {
  FlagArtifacts out;
  out.corpus = tomography::AdLogCorpus(ads);
  ASSIGN_OR_RETURN(std::vector<tomography::VectorRecord> collated,
                   tomography::Collate(ads, out.corpus));
  const std::vector<std::string> advertisers = world.AdvertiserIds();
  const std::vector<std::string> persona_ids = PersonaIds(personas);
  std::vector<tomography::VectorRecord> all = tomography::CompleteRecords(
      std::move(collated), advertisers, persona_ids, config.sim.run.runs,
      out.corpus);
  std::map<std::string, bool, std::less<>> is_control;
  for (const auto& p : personas) is_control[p.id] = p.is_control;
  std::vector<tomography::VectorRecord> treated;
  for (auto& r : all) {
    auto it = is_control.find(r.persona);
    if (it == is_control.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("ad log names unknown persona '", r.persona, "'"));
    }
    (it->second ? out.control_records : treated).push_back(std::move(r));
  }
  ASSIGN_OR_RETURN(out.records, tomography::FlagChanges(
                                    treated, out.control_records, config.stats));
  return out;
}

absl::StatusOr<InferenceArtifacts> InferStage(
    const PipelineConfig& config, const ecosim::World& world,
    std::span<const ecosim::Persona> personas,
    std::span<const tomography::VectorRecord> records) {
  std::map<std::string, BlockingConfig> blocking;
  for (const auto& p : personas) {
    if (!p.is_control) blocking[p.id] = p.blocking;
  }
  ASSIGN_OR_RETURN(tomography::Segmentation seg,
                   tomography::SegmentRecords(records, config.sim.run.runs,
                                              config.holdout_runs,
                                              config.seed));
  tomography::InferenceOptions options;
  options.grid = config.grid;
  options.folds = config.folds;
  options.accuracy_threshold = config.accuracy_threshold;
  options.seed = config.seed;
  InferenceArtifacts out;
  out.holdout_runs = seg.holdout_runs;
  const std::vector<std::string> trackers = world.TrackerIds();
  ASSIGN_OR_RETURN(out.rows, tomography::RunInference(seg.cv, seg.holdout,
                                                      blocking, trackers,
                                                      options));
  return out;
}

absl::StatusOr<InMemoryResult> RunInMemory(const PipelineConfig& config) {
  RETURN_IF_ERROR(ValidatePipelineConfig(config));
  InMemoryResult out;
  ASSIGN_OR_RETURN(out.simulation, SimulateStage(config));
  const SimulationArtifacts& sim = out.simulation;
  ASSIGN_OR_RETURN(out.flags, FlagStage(config, sim.world, sim.personas,
                                        sim.logs.ads));
  ASSIGN_OR_RETURN(out.inference, InferStage(config, sim.world, sim.personas,
                                             out.flags.records));
  const auto edges = tomography::InferredEdges(out.inference.rows);
  out.evaluation = tomography::Evaluate(edges, sim.world.graph());
  return out;
}

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return 2;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
      return 3;
    default:
      return 1;
  }
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

const std::string& Pipeline::input_dir() const {
  return input_dir_ ? *input_dir_ : config_.output_dir;
}

absl::StatusOr<SimulationArtifacts> Pipeline::LoadWorld() const {
  RETURN_IF_ERROR(ValidatePipelineConfig(config_));
  SimulationArtifacts out;
  ASSIGN_OR_RETURN(out.world, ecosim::BuildWorld(config_.sim, config_.seed));
  ASSIGN_OR_RETURN(out.personas,
                   ecosim::ResolvePersonas(out.world, config_.sim.run));
  return out;
}

absl::Status Pipeline::Simulate() {
  RETURN_IF_ERROR(ValidatePipelineConfig(config_));
  ASSIGN_OR_RETURN(SimulationArtifacts sim, SimulateStage(config_));
  const std::string& dir = config_.output_dir;
  RETURN_IF_ERROR(WriteFile(dir, kWorld, Dump(json_io::WorldToJson(sim.world))));
  RETURN_IF_ERROR(WriteFile(
      dir, kAdLog,
      ToJsonl<ecosim::AdRecord>(sim.logs.ads, json_io::AdRecordToJson)));
  RETURN_IF_ERROR(WriteFile(
      dir, kRequestLog,
      ToJsonl<ecosim::RequestLogEntry>(sim.logs.requests,
                                       json_io::RequestToJson)));
  RETURN_IF_ERROR(WriteFile(
      dir, kBidLog,
      ToJsonl<ecosim::BidRecord>(sim.logs.bids, json_io::BidToJson)));
  return absl::OkStatus();
}

absl::Status Pipeline::SyncDetect() {
  auto requests = FromJsonl<ecosim::RequestLogEntry>(input_dir(), kRequestLog,
                                                     json_io::RequestFromJson);
  RETURN_IF_ERROR(requests.status());
  auto detection = syncdetect::DetectCookieSync(*requests);
  if (!detection.ok()) return InFile(kRequestLog, detection.status());
  return WriteFile(config_.output_dir, kSyncPairs,
                   Dump(json_io::SyncDetectionToJson(*detection)));
}

absl::Status Pipeline::Flag() {
  ASSIGN_OR_RETURN(SimulationArtifacts sim, LoadWorld());
  ASSIGN_OR_RETURN(std::vector<ecosim::AdRecord> ads,
                   FromJsonl<ecosim::AdRecord>(input_dir(), kAdLog,
                                               json_io::AdRecordFromJson));
  ASSIGN_OR_RETURN(FlagArtifacts flags,
                   FlagStage(config_, sim.world, sim.personas, ads));
  const std::string& dir = config_.output_dir;
  RETURN_IF_ERROR(
      WriteFile(dir, kCorpus, Dump(json_io::CorpusToJson(flags.corpus))));
  RETURN_IF_ERROR(WriteFile(
      dir, kRecords,
      ToJsonl<tomography::VectorRecord>(flags.records, json_io::RecordToJson)));
  RETURN_IF_ERROR(WriteFile(
      dir, kControlRecords,
      ToJsonl<tomography::VectorRecord>(flags.control_records,
                                        json_io::RecordToJson)));
  return absl::OkStatus();
}

absl::Status Pipeline::Infer() {
  ASSIGN_OR_RETURN(SimulationArtifacts sim, LoadWorld());
  ASSIGN_OR_RETURN(Json corpus_json, ParseJsonFile(input_dir(), kCorpus));
  auto corpus = json_io::CorpusFromJson(corpus_json);
  if (!corpus.ok()) return InFile(kCorpus, corpus.status());
  ASSIGN_OR_RETURN(std::vector<tomography::VectorRecord> records,
                   ReadRecords(input_dir(), kRecords, *corpus));
  ASSIGN_OR_RETURN(InferenceArtifacts inference,
                   InferStage(config_, sim.world, sim.personas, records));
  const std::string& dir = config_.output_dir;
  RETURN_IF_ERROR(WriteFile(dir, kReportJson,
                            Dump(ReportToJson(config_, sim.world, inference))));
  RETURN_IF_ERROR(
      WriteFile(dir, kReportCsv, ReportToCsv(sim.world, inference)));
  return absl::OkStatus();
}

absl::Status Pipeline::Evaluate() {
  ASSIGN_OR_RETURN(SimulationArtifacts sim, LoadWorld());
  ASSIGN_OR_RETURN(Json report, ParseJsonFile(input_dir(), kReportJson));
  ASSIGN_OR_RETURN(std::vector<tomography::Edge> edges,
                   EdgesFromReport(report));
  const tomography::Evaluation e =
      tomography::Evaluate(edges, sim.world.graph());
  Log(LogLevel::kInfo, absl::StrCat("precision ", e.precision, " recall ",
                                    e.recall));
  return WriteFile(config_.output_dir, kEvaluation,
                   Dump(EvaluationReport(e, edges, sim.world)));
}

absl::Status Pipeline::H1(const std::optional<std::string>& documents_path) {
  std::vector<textvec::Document> documents;
  if (documents_path.has_value()) {
    std::ifstream in(*documents_path);
    if (!in) {
      return absl::NotFoundError(
          absl::StrCat("cannot read '", *documents_path, "'"));
    }
    ASSIGN_OR_RETURN(documents, textvec::ReadDocumentsJsonl(in));
  } else {
    ASSIGN_OR_RETURN(SimulationArtifacts sim, LoadWorld());
    ASSIGN_OR_RETURN(std::vector<ecosim::AdRecord> ads,
                     FromJsonl<ecosim::AdRecord>(input_dir(), kAdLog,
                                                 json_io::AdRecordFromJson));
    std::map<std::string, std::string> persona_group;
    for (const auto& p : sim.personas) persona_group[p.id] = p.group;
    documents = tomography::GroupDocuments(ads, persona_group);
  }
  ASSIGN_OR_RETURN(tomography::H1Result h1,
                   tomography::H1SimilarityMatrix(documents));
  const std::string& dir = config_.output_dir;
  RETURN_IF_ERROR(WriteFile(dir, kH1Json, Dump(H1ToJson(h1))));
  RETURN_IF_ERROR(WriteFile(dir, kH1Csv, H1ToCsv(h1)));
  return absl::OkStatus();
}

absl::Status Pipeline::Run() {
  // Later stages read what earlier ones wrote.
  std::optional<std::string> saved = input_dir_;
  input_dir_.reset();
  absl::Status status = Simulate();
  if (status.ok()) status = SyncDetect();
  if (status.ok()) status = Flag();
  if (status.ok()) status = Infer();
  if (status.ok()) status = Evaluate();
  input_dir_ = std::move(saved);
  return status;
}

}  // namespace adtomo
