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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metasql/run_record.hpp"
#include "metasql/schema.hpp"
#include "metasql/sql_ast.hpp"

namespace metasql {

// Clause-by-clause set comparison with literal values disregarded.
// Alias- and order-insensitive wherever SQL semantics allow.
bool exact_match(const SqlQuery& candidate, const SqlQuery& gold);

struct ExecOutcome {
  bool match = false;
  std::string error;  // non-empty when either statement failed to run
};

// Runs both statements against the SQLite file and compares results: as
// ordered sequences when the gold has a top-level ORDER BY, as multisets
// otherwise. Column order is ignored (any permutation of the candidate's
// columns may match). Reals compare with tolerance 1e-6; NULL equals NULL.
ExecOutcome execution_match(std::string_view candidate_sql, std::string_view gold_sql,
                            const std::filesystem::path& db_path);

// True when the statement has ORDER BY outside any parentheses.
bool has_top_level_order_by(std::string_view sql);

// Ranks are 1-based; nullopt means the gold query is absent.
using GoldRank = std::optional<std::size_t>;

double precision_at_k(std::span<const GoldRank> ranks, std::size_t k);
double mrr(std::span<const GoldRank> ranks, std::size_t cutoff = 5);

enum class Difficulty { kEasy, kMedium, kHard, kExtraHard };

std::string_view difficulty_name(Difficulty d);
Difficulty difficulty_for_hardness(int hardness);
Difficulty classify_difficulty(const SqlQuery& query);

enum class StatementType { kNested, kNegation, kOrderBy, kGroupBy };

std::string_view statement_type_name(StatementType t);
std::vector<StatementType> statement_types(const SqlQuery& query);

// DCG / IDCG with gain = label and log2 discount. Items are ordered by
// descending score (stable). Returns 1.0 when the ideal DCG is zero.
double ndcg(std::span<const double> scores, std::span<const double> labels);

// Position of the first ranked candidate that exactly matches the gold.
GoldRank gold_rank(const RunRecord& record, const SqlQuery& gold, const SchemaDb& schema);

struct EvalReport {
  struct Bucket {
    std::size_t count = 0;
    double em = 0.0;
    std::optional<double> ex;
  };

  std::size_t total = 0;
  double em = 0.0;
  std::optional<double> ex;
  std::map<std::size_t, double> precision_at;
  double mrr = 0.0;
  std::map<std::string, Bucket> per_difficulty;
  std::map<std::string, Bucket> per_statement_type;
};

struct EvalOptions {
  // When set, execution match runs against
  // <data_root>/database/<db_id>/<db_id>.sqlite.
  std::optional<std::filesystem::path> data_root;
  std::vector<std::size_t> precision_ks = {1, 3, 5, 10};
  std::size_t mrr_cutoff = 5;
};

// Throws FormatError for an empty record list, a record without gold SQL,
// an unknown db_id, or an unparseable gold query.
EvalReport evaluate_records(const std::vector<RunRecord>& records,
                            const std::map<std::string, SchemaDb>& schemas,
                            const EvalOptions& options = {});

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

std::filesystem::path database_path(const std::filesystem::path& data_root,
                                    std::string_view db_id);

}  // namespace metasql
