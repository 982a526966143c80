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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metasql {

// Structured trace of one pipeline run over one NL query. Serialized as one
// JSON object per line.
struct RunRecord {
  struct LabelScore {
    std::string label;
    double score = 0.0;
    bool operator==(const LabelScore&) const = default;
  };
  struct CandidateEntry {
    std::string sql;
    std::string condition;  // flattened metadata
    std::string backend;
    bool parsed = false;
    std::string error;
    bool operator==(const CandidateEntry&) const = default;
  };
  struct Stage1Entry {
    std::size_t candidate = 0;
    double score = 0.0;
    bool operator==(const Stage1Entry&) const = default;
  };
  struct RankedEntry {
    std::size_t candidate = 0;
    std::string sql;
    double stage1_score = 0.0;
    double global_score = 0.0;
    std::vector<double> phrase_scores;
    double final_score = 0.0;
    bool operator==(const RankedEntry&) const = default;
  };

  std::string query_id;
  std::string db_id;
  std::string nl;
  std::optional<std::string> gold_sql;
  std::vector<LabelScore> predictions;
  std::vector<std::string> selected_labels;
  std::vector<std::string> compositions;
  std::vector<CandidateEntry> candidates;
  std::vector<Stage1Entry> stage1;
  std::vector<RankedEntry> ranked;
  std::optional<std::string> chosen_sql;
  std::vector<std::string> errors;

  bool operator==(const RunRecord&) const = default;
};

std::string to_json_line(const RunRecord& record);
// Throws FormatError on malformed input.
RunRecord parse_run_record(std::string_view line);

}  // namespace metasql
