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

#include "adtomo/tomography.h"

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "adtomo/rng.h"
#include "adtomo/status_macros.h"

namespace adtomo::tomography {
namespace {

bool RecordLess(const VectorRecord& a, const VectorRecord& b) {
  return std::tie(a.advertiser, a.persona, a.run) <
         std::tie(b.advertiser, b.persona, b.run);
}

// Gain comparisons ignore differences at rounding level, so a gain vector
// that is uniform up to normalization error infers nothing.
constexpr double kRuleTolerance = 1e-12;

}  // namespace

std::vector<BlockingConfig> EnumerateBlockingConfigs(size_t num_trackers) {
  std::vector<BlockingConfig> out;
  const uint64_t count = uint64_t{1} << num_trackers;
  out.reserve(count);
  for (uint64_t mask = 0; mask < count; ++mask) out.push_back({mask});
  return out;
}

textvec::Corpus AdLogCorpus(std::span<const ecosim::AdRecord> ads) {
  std::vector<std::string> tokens;
  for (const auto& ad : ads) {
    tokens.insert(tokens.end(), ad.tokens.begin(), ad.tokens.end());
  }
  return textvec::Corpus(std::move(tokens));
}

absl::StatusOr<std::vector<VectorRecord>> Collate(
    std::span<const ecosim::AdRecord> ads, const textvec::Corpus& corpus) {
  using Key = std::tuple<std::string, std::string, int>;
  std::map<Key, std::vector<textvec::CountVector::Entry>> groups;
  for (const auto& ad : ads) {
    auto& entries = groups[Key{ad.advertiser, ad.persona, ad.run}];
    for (const auto& token : ad.tokens) {
      auto index = corpus.IndexOf(token);
      if (!index) {
        return absl::InvalidArgumentError(absl::StrCat(
            "token '", token, "' from advertiser '", ad.advertiser,
            "' is not in the corpus"));
      }
      entries.emplace_back(*index, 1);
    }
  }
  std::vector<VectorRecord> records;
  records.reserve(groups.size());
  for (auto& [key, entries] : groups) {
    ASSIGN_OR_RETURN(textvec::CountVector v,
                     textvec::CountVector::FromEntries(corpus, std::move(entries)));
    records.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                       std::move(v), std::nullopt});
  }
  return records;
}

std::vector<VectorRecord> CompleteRecords(
    std::vector<VectorRecord> records, std::span<const std::string> advertisers,
    std::span<const std::string> personas, int runs,
    const textvec::Corpus& corpus) {
  std::set<std::tuple<absl::string_view, absl::string_view, int>> present;
  for (const auto& r : records) present.emplace(r.advertiser, r.persona, r.run);
  std::vector<VectorRecord> added;
  for (const auto& a : advertisers) {
    for (const auto& p : personas) {
      for (int run = 0; run < runs; ++run) {
        if (!present.contains({a, p, run})) {
          added.push_back({a, p, run, textvec::CountVector(corpus), std::nullopt});
        }
      }
    }
  }
  records.insert(records.end(), std::make_move_iterator(added.begin()),
                 std::make_move_iterator(added.end()));
  std::sort(records.begin(), records.end(), RecordLess);
  return records;
}

absl::StatusOr<std::vector<VectorRecord>> FlagChanges(
    std::span<const VectorRecord> records,
    std::span<const VectorRecord> control_records,
    const stats::StatConfig& config) {
  RETURN_IF_ERROR(stats::ValidateStatConfig(config));
  std::map<std::pair<std::string, int>, std::vector<textvec::CountVector>> pools;
  for (const auto& c : control_records) {
    pools[{c.advertiser, c.run}].push_back(c.vector);
  }
  std::map<std::pair<std::string, int>, textvec::CountVector> pooled;
  for (auto& [key, vectors] : pools) {
    ASSIGN_OR_RETURN(pooled[key], textvec::MergeVectors(vectors));
  }

  std::vector<VectorRecord> out(records.begin(), records.end());
  for (auto& record : out) {
    auto it = pooled.find({record.advertiser, record.run});
    if (it == pooled.end()) {
      return absl::FailedPreconditionError(
          absl::StrCat("no control record for advertiser '", record.advertiser,
                       "' in run ", record.run));
    }
    const textvec::CountVector& control = it->second;
    if (!control.SameCorpus(record.vector)) {
      return absl::InvalidArgumentError(
          "record and control vectors come from different corpora");
    }
    record.is_different_from_control = false;
    if (record.vector.IsZero()) continue;

    // Dense 2 x V table over the columns either side uses.
    std::vector<double> control_row, persona_row;
    auto ci = control.entries().begin();
    auto pi = record.vector.entries().begin();
    while (ci != control.entries().end() || pi != record.vector.entries().end()) {
      if (pi == record.vector.entries().end() ||
          (ci != control.entries().end() && ci->first < pi->first)) {
        control_row.push_back(static_cast<double>(ci->second));
        persona_row.push_back(0.0);
        ++ci;
      } else if (ci == control.entries().end() || pi->first < ci->first) {
        control_row.push_back(0.0);
        persona_row.push_back(static_cast<double>(pi->second));
        ++pi;
      } else {
        control_row.push_back(static_cast<double>(ci->second));
        persona_row.push_back(static_cast<double>(pi->second));
        ++ci;
        ++pi;
      }
    }
    auto result = stats::ChiSquareIndependence(control_row, persona_row, config);
    if (!result.ok()) {
      if (result.status().code() == absl::StatusCode::kFailedPrecondition) {
        continue;  // too few effective columns
      }
      return result.status();
    }
    record.is_different_from_control = result->p_value < config.alpha;
  }
  return out;
}

absl::StatusOr<Segmentation> SegmentRecords(std::span<const VectorRecord> records,
                                            int runs, int holdout_runs,
                                            uint64_t seed) {
  if (runs < 1) return absl::InvalidArgumentError("runs: must be >= 1");
  if (holdout_runs < 0 || holdout_runs >= runs) {
    return absl::InvalidArgumentError(absl::StrCat(
        "holdout_runs: must be in [0, ", runs, "), got ", holdout_runs));
  }
  std::map<std::pair<std::string, std::string>, std::vector<int>> pair_runs;
  for (const auto& r : records) {
    if (r.run < 0 || r.run >= runs) {
      return absl::InvalidArgumentError(absl::StrCat(
          "record (", r.advertiser, ", ", r.persona, ") has run ", r.run,
          " outside [0, ", runs, ")"));
    }
    pair_runs[{r.advertiser, r.persona}].push_back(r.run);
  }
  for (auto& [pair, rs] : pair_runs) {
    std::sort(rs.begin(), rs.end());
    bool complete = rs.size() == static_cast<size_t>(runs);
    for (int i = 0; complete && i < runs; ++i) complete = rs[i] == i;
    if (!complete) {
      return absl::InvalidArgumentError(absl::StrCat(
          "missing records: (", pair.first, ", ", pair.second, ") needs one "
          "record per run, has ", rs.size(), " of ", runs));
    }
  }

  Rng rng(DeriveSeed(seed, "segment"));
  std::vector<int> order(runs);
  for (int i = 0; i < runs; ++i) order[i] = i;
  for (int i = runs; i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(static_cast<size_t>(i))]);
  }
  Segmentation seg;
  seg.holdout_runs.assign(order.begin(), order.begin() + holdout_runs);
  std::sort(seg.holdout_runs.begin(), seg.holdout_runs.end());
  for (const auto& r : records) {
    const bool held = std::binary_search(seg.holdout_runs.begin(),
                                         seg.holdout_runs.end(), r.run);
    (held ? seg.holdout : seg.cv).push_back(r);
  }
  std::sort(seg.cv.begin(), seg.cv.end(), RecordLess);
  std::sort(seg.holdout.begin(), seg.holdout.end(), RecordLess);
  return seg;
}

std::vector<size_t> InferRelationships(
    const forest::FeatureImportance& importance, double holdout_accuracy,
    double accuracy_threshold) {
  std::vector<size_t> inferred;
  if (holdout_accuracy < accuracy_threshold || importance.gains.empty()) {
    return inferred;
  }
  auto moments = stats::ComputeMeanStd(importance.gains);
  const double cutoff = moments->mean + moments->stddev;
  for (size_t i = 0; i < importance.gains.size(); ++i) {
    if (importance.gains[i] > cutoff + kRuleTolerance) inferred.push_back(i);
  }
  return inferred;
}

absl::StatusOr<std::vector<AdvertiserReport>> RunInference(
    std::span<const VectorRecord> cv, std::span<const VectorRecord> holdout,
    const std::map<std::string, BlockingConfig>& blocking,
    std::span<const std::string> trackers, const InferenceOptions& options) {
  if (!(options.accuracy_threshold > 0.0 && options.accuracy_threshold <= 1.0)) {
    return absl::InvalidArgumentError("accuracy_threshold: must be in (0,1]");
  }
  RETURN_IF_ERROR(options.grid.Validate());

  auto to_samples = [&](std::span<const VectorRecord> records)
      -> absl::StatusOr<std::map<std::string, std::vector<forest::Sample>>> {
    std::map<std::string, std::vector<forest::Sample>> by_adv;
    for (const auto& r : records) {
      if (!r.is_different_from_control.has_value()) {
        return absl::FailedPreconditionError(absl::StrCat(
            "record (", r.advertiser, ", ", r.persona, ", run ", r.run,
            ") has no change flag (flag stage required)"));
      }
      auto it = blocking.find(r.persona);
      if (it == blocking.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("persona '", r.persona, "' has no blocking config"));
      }
      by_adv[r.advertiser].push_back({it->second.AsFeatures(trackers.size()),
                                      *r.is_different_from_control, r.persona});
    }
    return by_adv;
  };
  ASSIGN_OR_RETURN(auto cv_samples, to_samples(cv));
  ASSIGN_OR_RETURN(auto holdout_samples, to_samples(holdout));

  std::vector<AdvertiserReport> rows;
  for (const auto& [advertiser, samples] : cv_samples) {
    const uint64_t seed =
        DeriveSeed(options.seed, "infer", {HashString(advertiser)});
    AdvertiserReport row;
    row.advertiser = advertiser;
    row.cv_records = samples.size();
    row.cv_flagged = static_cast<size_t>(std::count_if(
        samples.begin(), samples.end(),
        [](const forest::Sample& s) { return s.label; }));

    auto cv_result =
        forest::CrossValidateGrid(samples, options.grid, options.folds, seed);
    if (!cv_result.ok()) {
      return absl::Status(cv_result.status().code(),
                          absl::StrCat("advertiser '", advertiser, "': ",
                                       cv_result.status().message()));
    }
    row.best_params = cv_result->best;
    row.cv_accuracy = cv_result->accuracy;
    ASSIGN_OR_RETURN(
        forest::ForestModel model,
        forest::TrainForest(samples, row.best_params, DeriveSeed(seed, "final")));

    double gate_accuracy = row.cv_accuracy;
    if (auto it = holdout_samples.find(advertiser);
        it != holdout_samples.end() && !it->second.empty()) {
      ASSIGN_OR_RETURN(double acc, forest::Accuracy(model, it->second));
      row.holdout_accuracy = acc;
      row.holdout_records = it->second.size();
      gate_accuracy = acc;
    }
    const forest::FeatureImportance importance =
        forest::ComputeFeatureImportance(model);
    row.importance = importance.gains;
    for (size_t t : InferRelationships(importance, gate_accuracy,
                                       options.accuracy_threshold)) {
      row.inferred.push_back(trackers[t]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Edge> InferredEdges(std::span<const AdvertiserReport> rows) {
  std::vector<Edge> edges;
  for (const auto& row : rows) {
    for (const auto& t : row.inferred) edges.push_back({t, row.advertiser});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Evaluation Evaluate(std::span<const Edge> inferred,
                    const ecosim::SharingGraph& truth) {
  std::set<Edge> predicted(inferred.begin(), inferred.end());
  std::set<Edge> actual;
  for (const auto& e : truth.edges) actual.insert({e.tracker, e.advertiser});
  Evaluation eval;
  for (const auto& e : predicted) {
    if (actual.contains(e)) {
      ++eval.true_positives;
    } else {
      ++eval.false_positives;
    }
  }
  eval.false_negatives = actual.size() - eval.true_positives;
  if (!predicted.empty()) {
    eval.precision = static_cast<double>(eval.true_positives) /
                     static_cast<double>(predicted.size());
  }
  if (!actual.empty()) {
    eval.recall = static_cast<double>(eval.true_positives) /
                  static_cast<double>(actual.size());
  }
  return eval;
}

std::vector<textvec::Document> GroupDocuments(
    std::span<const ecosim::AdRecord> ads,
    const std::map<std::string, std::string>& persona_group) {
  std::map<textvec::DocumentKey, std::vector<std::string>> docs;
  for (const auto& ad : ads) {
    auto it = persona_group.find(ad.persona);
    if (it == persona_group.end()) continue;
    auto& tokens = docs[{it->second, ad.run}];
    tokens.insert(tokens.end(), ad.tokens.begin(), ad.tokens.end());
  }
  std::vector<textvec::Document> out;
  for (auto& [key, tokens] : docs) out.push_back({key, std::move(tokens)});
  return out;
}

absl::StatusOr<H1Result> H1SimilarityMatrix(
    std::span<const textvec::Document> documents) {
  const textvec::Corpus corpus = textvec::BuildCorpus(documents);
  std::map<std::string, std::vector<textvec::CountVector>> by_group;
  for (const auto& d : documents) {
    ASSIGN_OR_RETURN(auto v, textvec::Vectorize(d, corpus));
    by_group[d.key.id].push_back(std::move(v));
  }
  if (by_group.empty()) {
    return absl::InvalidArgumentError("no documents");
  }
  for (const auto& [group, vectors] : by_group) {
    if (vectors.size() < 2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "group '", group, "' has ", vectors.size(),
          " run(s); at least 2 are needed"));
    }
  }

  H1Result result;
  for (const auto& [group, vectors] : by_group) result.groups.push_back(group);
  const size_t g = result.groups.size();
  std::vector<std::vector<std::vector<double>>> dist(
      g, std::vector<std::vector<double>>(g));
  for (size_t i = 0; i < g; ++i) {
    const auto& vi = by_group[result.groups[i]];
    for (size_t j = i; j < g; ++j) {
      const auto& vj = by_group[result.groups[j]];
      std::vector<double>& d = dist[i][j];
      for (size_t a = 0; a < vi.size(); ++a) {
        for (size_t b = (i == j ? a + 1 : 0); b < vj.size(); ++b) {
          ASSIGN_OR_RETURN(double s, textvec::CosineSimilarity(vi[a], vj[b]));
          d.push_back(s);
        }
      }
      dist[j][i] = d;
    }
  }

  result.mean_similarity.assign(g, std::vector<double>(g, 0.0));
  result.tests.assign(g, std::vector<std::optional<stats::TestResult>>(g));
  for (size_t i = 0; i < g; ++i) {
    for (size_t j = 0; j < g; ++j) {
      ASSIGN_OR_RETURN(auto m, stats::ComputeMeanStd(dist[i][j]));
      result.mean_similarity[i][j] = m.mean;
      if (i == j) continue;
      auto t = stats::WelchTTest(dist[i][i], dist[i][j]);
      if (t.ok()) result.tests[i][j] = *t;
    }
  }
  return result;
}

}  // namespace adtomo::tomography
