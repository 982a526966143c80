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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metasql/generator.hpp"
#include "metasql/run_record.hpp"
#include "metasql/schema.hpp"
#include "metasql/sql_ast.hpp"

namespace metasql {

enum class Split { kTrain, kDev, kTest };

std::string_view split_name(Split split);
// Throws ConfigError.
Split split_from_name(std::string_view name);
// File name of the split inside a Spider-layout data root.
std::string_view split_file(Split split);

struct BenchmarkExample {
  std::string query_id;  // "<split>_<zero-based index>"
  std::string db_id;
  std::string nl;
  std::string gold_sql;
  Split split = Split::kDev;
  std::optional<SqlQuery> gold;  // empty only in lenient loading
};

// Spider tables.json layout. Throws FormatError naming the object index and
// field.
std::map<std::string, SchemaDb> load_schemas(const std::filesystem::path& path);
std::map<std::string, SchemaDb> parse_schemas(std::string_view json_text);

// Spider example files: an array of objects with question, query, db_id.
// Strict loading throws ParseFailureSummary when any gold query fails to
// parse; lenient loading leaves `gold` empty for those.
std::vector<BenchmarkExample> load_examples(const std::filesystem::path& path, Split split,
                                            const std::map<std::string, SchemaDb>& schemas,
                                            bool strict = true);

// Appends one JSON line per record. Throws IoError.
void write_run_records(const std::filesystem::path& path, const std::vector<RunRecord>& records,
                       bool append = true);
// Throws IoError, or FormatError naming the line number.
std::vector<RunRecord> read_run_records(const std::filesystem::path& path);

// JSON array of {"schema", "question", "metadata", "sql"} objects, where
// metadata is a flattened metadata string.
std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path);

}  // namespace metasql
