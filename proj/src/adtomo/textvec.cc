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

#include "adtomo/textvec.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "adtomo/rng.h"
#include "json.hpp"

namespace adtomo::textvec {
namespace {

absl::Status CorpusMismatch() {
  return absl::InvalidArgumentError("count vectors come from different corpora");
}

}  // namespace

std::vector<std::string> Tokenize(absl::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    absl::string_view word = text.substr(i, j - i);
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    while (!word.empty() && !alnum(word.front())) word.remove_prefix(1);
    while (!word.empty() && !alnum(word.back())) word.remove_suffix(1);
    if (!word.empty()) {
      std::string token(word);
      for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.push_back(std::move(token));
    }
    i = j;
  }
  return out;
}

Corpus::Corpus(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
  uint64_t h = Mix64(tokens_.size());
  for (const auto& t : tokens_) h = Mix64(h ^ HashString(t));
  fingerprint_ = h;
}

std::optional<uint32_t> Corpus::IndexOf(absl::string_view token) const {
  auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
  if (it == tokens_.end() || *it != token) return std::nullopt;
  return static_cast<uint32_t>(it - tokens_.begin());
}

Corpus BuildCorpus(std::span<const Document> documents) {
  std::vector<std::string> tokens;
  for (const auto& d : documents) {
    tokens.insert(tokens.end(), d.tokens.begin(), d.tokens.end());
  }
  return Corpus(std::move(tokens));
}

absl::StatusOr<CountVector> CountVector::FromEntries(
    const Corpus& corpus, std::vector<Entry> entries) {
  return FromEntries(corpus.size(), corpus.fingerprint(), std::move(entries));
}

absl::StatusOr<CountVector> CountVector::FromEntries(
    size_t dimension, uint64_t fingerprint, std::vector<Entry> entries) {
  CountVector v(dimension, fingerprint);
  std::sort(entries.begin(), entries.end());
  for (const auto& [column, count] : entries) {
    if (column >= dimension) {
      return absl::OutOfRangeError(absl::StrCat(
          "column ", column, " outside corpus of size ", dimension));
    }
    if (count == 0) continue;
    if (!v.entries_.empty() && v.entries_.back().first == column) {
      v.entries_.back().second += count;
    } else {
      v.entries_.emplace_back(column, count);
    }
  }
  return v;
}

uint64_t CountVector::Get(uint32_t column) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(),
                             Entry{column, 0});
  if (it == entries_.end() || it->first != column) return 0;
  return it->second;
}

uint64_t CountVector::Total() const {
  uint64_t total = 0;
  for (const auto& e : entries_) total += e.second;
  return total;
}

absl::StatusOr<CountVector> Vectorize(std::span<const std::string> tokens,
                                      const Corpus& corpus) {
  std::vector<CountVector::Entry> entries;
  entries.reserve(tokens.size());
  for (const auto& token : tokens) {
    auto index = corpus.IndexOf(token);
    if (!index) {
      return absl::InvalidArgumentError(
          absl::StrCat("token '", token, "' is not in the corpus"));
    }
    entries.emplace_back(*index, 1);
  }
  return CountVector::FromEntries(corpus, std::move(entries));
}

absl::StatusOr<CountVector> MergeVectors(
    std::span<const CountVector> vectors) {
  if (vectors.empty()) {
    return absl::InvalidArgumentError("cannot merge an empty vector list");
  }
  std::vector<CountVector::Entry> entries;
  for (const auto& v : vectors) {
    if (!v.SameCorpus(vectors.front())) return CorpusMismatch();
    entries.insert(entries.end(), v.entries().begin(), v.entries().end());
  }
  return CountVector::FromEntries(vectors.front().dimension(),
                                  vectors.front().fingerprint(),
                                  std::move(entries));
}

absl::StatusOr<double> CosineSimilarity(const CountVector& x,
                                        const CountVector& y) {
  if (!x.SameCorpus(y)) return CorpusMismatch();
  if (x.IsZero() || y.IsZero()) return 0.0;
  // Two-pointer walk over the sorted entries; symmetric in x and y.
  long double dot = 0;
  auto xi = x.entries().begin();
  auto yi = y.entries().begin();
  while (xi != x.entries().end() && yi != y.entries().end()) {
    if (xi->first < yi->first) {
      ++xi;
    } else if (yi->first < xi->first) {
      ++yi;
    } else {
      dot += static_cast<long double>(xi->second) *
             static_cast<long double>(yi->second);
      ++xi;
      ++yi;
    }
  }
  auto norm2 = [](const CountVector& v) {
    long double s = 0;
    for (const auto& e : v.entries()) {
      s += static_cast<long double>(e.second) * static_cast<long double>(e.second);
    }
    return s;
  };
  const long double denom = std::sqrt(norm2(x)) * std::sqrt(norm2(y));
  const double sim = static_cast<double>(dot / denom);
  return std::clamp(sim, 0.0, 1.0);
}

absl::StatusOr<std::vector<Document>> ReadDocumentsJsonl(std::istream& in) {
  std::vector<Document> docs;
  std::set<DocumentKey> keys;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = absl::StrCat("line ", line_no);
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::InvalidArgumentError(absl::StrCat(where, ": invalid JSON"));
    }
    const auto key = j.find("key");
    const auto tokens = j.find("tokens");
    if (key == j.end() || !key->is_object() || !key->contains("id") ||
        !(*key)["id"].is_string() || !key->contains("run") ||
        !(*key)["run"].is_number_integer()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ".key: expected {\"id\": string, \"run\": int}"));
    }
    if (tokens == j.end() || !tokens->is_array()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ".tokens: expected an array of strings"));
    }
    Document doc;
    doc.key = {(*key)["id"].get<std::string>(), (*key)["run"].get<int>()};
    for (const auto& t : *tokens) {
      if (!t.is_string()) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, ".tokens: expected an array of strings"));
      }
      for (auto& w : Tokenize(t.get<std::string>())) {
        doc.tokens.push_back(std::move(w));
      }
    }
    if (!keys.insert(doc.key).second) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": duplicate document key (", doc.key.id, ", ",
                       doc.key.run, ")"));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace adtomo::textvec
