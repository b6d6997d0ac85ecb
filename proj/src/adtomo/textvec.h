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

// Bag-of-words featurization of ad creative descriptions.

#ifndef ADTOMO_TEXTVEC_H_
#define ADTOMO_TEXTVEC_H_

#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace adtomo::textvec {

// Whitespace split, lowercase, strip non-alphanumeric characters from both
// ends of each word. Words that become empty are dropped.
std::vector<std::string> Tokenize(absl::string_view text);

struct DocumentKey {
  std::string id;  // group or persona id
  int run = 0;

  friend auto operator<=>(const DocumentKey&, const DocumentKey&) = default;
};

struct Document {
  DocumentKey key;
  std::vector<std::string> tokens;
};

// Token <-> column bijection. Columns follow lexicographic token order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<std::string> tokens);

  size_t size() const { return tokens_.size(); }
  const std::string& token(size_t index) const { return tokens_[index]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<uint32_t> IndexOf(absl::string_view token) const;
  // Identifies the corpus a vector was built against.
  uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<std::string> tokens_;
  uint64_t fingerprint_ = 0;
};

Corpus BuildCorpus(std::span<const Document> documents);

// Sparse frequency vector over a corpus. Entries are sorted by column and
// every stored count is at least 1.
class CountVector {
 public:
  using Entry = std::pair<uint32_t, uint64_t>;

  CountVector() = default;
  // An all-zero vector over `corpus`.
  explicit CountVector(const Corpus& corpus)
      : dimension_(corpus.size()), fingerprint_(corpus.fingerprint()) {}
  // An all-zero vector over a corpus known only by its identity.
  CountVector(size_t dimension, uint64_t fingerprint)
      : dimension_(dimension), fingerprint_(fingerprint) {}
  // Entries need not be sorted; duplicates are summed and zeros dropped.
  static absl::StatusOr<CountVector> FromEntries(const Corpus& corpus,
                                                 std::vector<Entry> entries);
  static absl::StatusOr<CountVector> FromEntries(size_t dimension,
                                                 uint64_t fingerprint,
                                                 std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  size_t dimension() const { return dimension_; }
  uint64_t fingerprint() const { return fingerprint_; }
  uint64_t Get(uint32_t column) const;
  uint64_t Total() const;
  bool IsZero() const { return entries_.empty(); }
  bool SameCorpus(const CountVector& other) const {
    return dimension_ == other.dimension_ &&
           fingerprint_ == other.fingerprint_;
  }

  friend bool operator==(const CountVector&, const CountVector&) = default;

 private:
  size_t dimension_ = 0;
  uint64_t fingerprint_ = 0;
  std::vector<Entry> entries_;
};

absl::StatusOr<CountVector> Vectorize(std::span<const std::string> tokens,
                                      const Corpus& corpus);
inline absl::StatusOr<CountVector> Vectorize(const Document& document,
                                             const Corpus& corpus) {
  return Vectorize(document.tokens, corpus);
}

// Element-wise sum. The list must be non-empty and share one corpus.
absl::StatusOr<CountVector> MergeVectors(std::span<const CountVector> vectors);

// dot(x, y) / (|x| |y|), and 0 when either vector is all-zero.
absl::StatusOr<double> CosineSimilarity(const CountVector& x,
                                        const CountVector& y);

// Reads JSON-lines records {"key": {"id": ..., "run": ...}, "tokens": [...]}.
// Each token string is normalized with Tokenize, so free-text descriptions
// are accepted too.
absl::StatusOr<std::vector<Document>> ReadDocumentsJsonl(std::istream& in);

}  // namespace adtomo::textvec

#endif  // ADTOMO_TEXTVEC_H_
