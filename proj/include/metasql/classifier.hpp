//
// Copyright 2026 The metasql Authors
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
//

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "metasql/metadata.hpp"
#include "metasql/schema.hpp"
#include "metasql/sql_ast.hpp"

namespace metasql {

// Hardness classification labels are multiples of 50 in [100, 900].
struct HardnessBucket {
  int value = kBaseRating;
  bool operator==(const HardnessBucket&) const = default;
};

inline constexpr int kMaxHardnessBucket = 900;
inline constexpr int kHardnessStep = 50;

HardnessBucket bucket_for(int hardness);

using MetadataLabel = std::variant<OperatorTag, HardnessBucket>;

// Tags in vocabulary order followed by hardness buckets ascending.
const std::vector<MetadataLabel>& label_vocabulary();
std::string label_name(const MetadataLabel& label);
std::optional<MetadataLabel> label_from_name(std::string_view name);

struct MetadataPrediction {
  MetadataLabel label;
  double score = 0.0;  // log-probability scale
};

struct LabelRequest {
  std::string query_id;
  std::string nl;
  const SchemaDb* schema = nullptr;
};

// Maps an NL query to one score per vocabulary label. Implementations must
// be safe for concurrent calls.
class MetadataClassifier {
 public:
  virtual ~MetadataClassifier() = default;
  // Throws BackendError.
  virtual std::vector<MetadataPrediction> predict_labels(const LabelRequest& request) const = 0;
};

// Keyword rules over the NL text.
class HeuristicClassifier final : public MetadataClassifier {
 public:
  std::vector<MetadataPrediction> predict_labels(const LabelRequest& request) const override;
};

// Externally computed predictions: tab-separated, header row
// `query_id<TAB><label>...` with labels in vocabulary order.
class FileClassifier final : public MetadataClassifier {
 public:
  explicit FileClassifier(const std::filesystem::path& path);
  std::vector<MetadataPrediction> predict_labels(const LabelRequest& request) const override;

 private:
  std::map<std::string, std::vector<double>> rows_;
};

// Derives labels from gold SQL; scores 0 for present labels and
// kAbsentScore otherwise. Test and analysis use only.
class OracleClassifier final : public MetadataClassifier {
 public:
  static constexpr double kAbsentScore = -100.0;
  explicit OracleClassifier(std::map<std::string, SqlQuery> gold_by_query_id);
  std::vector<MetadataPrediction> predict_labels(const LabelRequest& request) const override;

 private:
  std::map<std::string, SqlQuery> gold_;
};

struct LabelSet {
  TagSet tags;
  std::vector<int> hardness;  // ascending bucket values

  bool empty() const { return tags.empty() && hardness.empty(); }
  std::size_t size() const { return tags.size() + hardness.size(); }
  bool operator==(const LabelSet&) const = default;
};

// {label : score >= threshold}.
LabelSet select_labels(const std::vector<MetadataPrediction>& predictions, double threshold);

inline constexpr double kDefaultThreshold = 0.0;
inline constexpr std::size_t kDefaultMaxCompositions = 8;

// Observed (hardness bucket, tag set) combinations with frequencies.
class CompositionStore {
 public:
  struct Entry {
    int hardness = kBaseRating;
    TagSet tags;
    std::size_t count = 0;
    bool operator==(const Entry&) const = default;
  };

  CompositionStore() = default;
  static CompositionStore build(const std::vector<QueryMetadata>& corpus);

  bool empty() const { return entries_.empty(); }
  // Sorted by hardness, then tag mask.
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t count(int hardness, const TagSet& tags) const;

  std::string to_json() const;
  static CompositionStore from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static CompositionStore load(const std::filesystem::path& path);

  bool operator==(const CompositionStore&) const = default;

 private:
  std::vector<Entry> entries_;
};

// Stored compositions whose tags are a subset of the selected tags and whose
// hardness was selected, by descending frequency then size then vocabulary
// order, truncated to max_n. An empty store falls back to one composition
// per selected hardness bucket carrying all selected tags.
std::vector<QueryMetadata> enumerate_compositions(const LabelSet& labels,
                                                  const CompositionStore& store,
                                                  std::size_t max_n = kDefaultMaxCompositions);

}  // namespace metasql
