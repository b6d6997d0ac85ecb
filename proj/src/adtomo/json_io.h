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

// JSON and JSON-lines encodings of logs, records, models and reports. Field
// order is fixed so that artifacts are byte-for-byte reproducible.

#ifndef ADTOMO_JSON_IO_H_
#define ADTOMO_JSON_IO_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "adtomo/ecosim.h"
#include "adtomo/forest.h"
#include "adtomo/syncdetect.h"
#include "adtomo/textvec.h"
#include "adtomo/tomography.h"
#include "json.hpp"

namespace adtomo::json_io {

using Json = nlohmann::ordered_json;

Json WorldToJson(const ecosim::World& world);

Json AdRecordToJson(const ecosim::AdRecord& r);
absl::StatusOr<ecosim::AdRecord> AdRecordFromJson(const Json& j);

Json RequestToJson(const ecosim::RequestLogEntry& r);
absl::StatusOr<ecosim::RequestLogEntry> RequestFromJson(const Json& j);

Json BidToJson(const ecosim::BidRecord& r);
absl::StatusOr<ecosim::BidRecord> BidFromJson(const Json& j);

Json CorpusToJson(const textvec::Corpus& corpus);
absl::StatusOr<textvec::Corpus> CorpusFromJson(const Json& j);

Json RecordToJson(const tomography::VectorRecord& r);
absl::StatusOr<tomography::VectorRecord> RecordFromJson(
    const Json& j, const textvec::Corpus& corpus);

Json ParamsToJson(const forest::ForestParams& p);
// Trees as nested node objects.
Json ForestToJson(const forest::ForestModel& model);

Json SyncDetectionToJson(const syncdetect::SyncDetection& d);
Json EvaluationToJson(const tomography::Evaluation& e);

// Writes one compact JSON value per line.
template <typename T, typename Fn>
void WriteJsonl(std::ostream& out, std::span<const T> items, Fn to_json) {
  for (const auto& item : items) out << to_json(item).dump() << '\n';
}

// Parses a JSON-lines stream; blank lines are skipped. Errors name the line.
template <typename T, typename Fn>
absl::StatusOr<std::vector<T>> ReadJsonl(std::istream& in, Fn from_json) {
  std::vector<T> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError(
          "line " + std::to_string(line_no) + ": invalid JSON");
    }
    auto item = from_json(j);
    if (!item.ok()) {
      return absl::Status(item.status().code(),
                          "line " + std::to_string(line_no) + ": " +
                              std::string(item.status().message()));
    }
    out.push_back(*std::move(item));
  }
  return out;
}

}  // namespace adtomo::json_io

#endif  // ADTOMO_JSON_IO_H_
