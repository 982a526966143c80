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

#include "metasql/corpus.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "metasql/error.hpp"
#include "strings.hpp"

namespace metasql {

using nlohmann::json;

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "dev";
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw ConfigError("split must be train, dev or test, got '" + std::string(name) + "'");
}

std::string_view split_file(Split split) {
  switch (split) {
    case Split::kTrain: return "train_spider.json";
    case Split::kDev: return "dev.json";
    case Split::kTest: return "test.json";
  }
  return "dev.json";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const json& field(const json& obj, const char* name, std::size_t index) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw FormatError("schema object " + std::to_string(index) + ": missing field '" + name + "'");
  }
  return *it;
}

SchemaDb schema_from_json(const json& obj, std::size_t index) {
  auto bad = [&](const char* name, const std::string& what) {
    return FormatError("schema object " + std::to_string(index) + ": field '" + name + "' " + what);
  };
  try {
    const auto db_id = field(obj, "db_id", index).get<std::string>();
    const auto& originals = field(obj, "table_names_original", index);
    const auto& columns_original = field(obj, "column_names_original", index);
    const auto& columns_natural = field(obj, "column_names", index);
    const auto& fks = field(obj, "foreign_keys", index);
    const auto& pks = field(obj, "primary_keys", index);
    const json naturals = obj.value("table_names", json::array());
    const json types = obj.value("column_types", json::array());

    std::vector<TableInfo> tables;
    for (std::size_t t = 0; t < originals.size(); ++t) {
      TableInfo info{originals[t].get<std::string>(), ""};
      if (t < naturals.size()) info.natural_name = naturals[t].get<std::string>();
      tables.push_back(std::move(info));
    }
    if (columns_natural.size() != columns_original.size()) {
      throw bad("column_names", "length differs from column_names_original");
    }
    std::vector<ColumnInfo> columns;
    for (std::size_t c = 0; c < columns_original.size(); ++c) {
      const auto& pair = columns_original[c];
      if (!pair.is_array() || pair.size() != 2) throw bad("column_names_original", "entry is not a pair");
      ColumnInfo info;
      info.table = pair[0].get<int>();
      info.name = pair[1].get<std::string>();
      info.natural_name = columns_natural[c].at(1).get<std::string>();
      if (c < types.size()) info.type = types[c].get<std::string>();
      columns.push_back(std::move(info));
    }
    std::vector<int> primary;
    for (const auto& k : pks) {
      if (k.is_array()) {
        for (const auto& inner : k) primary.push_back(inner.get<int>());
      } else {
        primary.push_back(k.get<int>());
      }
    }
    std::vector<std::pair<int, int>> foreign;
    for (const auto& k : fks) {
      if (!k.is_array() || k.size() != 2) throw bad("foreign_keys", "entry is not a pair");
      foreign.emplace_back(k[0].get<int>(), k[1].get<int>());
    }
    try {
      return SchemaDb(db_id, std::move(tables), std::move(columns), std::move(primary),
                      std::move(foreign));
    } catch (const FormatError& e) {
      throw FormatError("schema object " + std::to_string(index) + ": " + e.what());
    }
  } catch (const json::exception& e) {
    throw FormatError("schema object " + std::to_string(index) + ": " + e.what());
  }
}

}  // namespace

std::map<std::string, SchemaDb> parse_schemas(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("schema file is not valid JSON: ") + e.what());
  }
  if (!root.is_array()) throw FormatError("schema file must hold a JSON array");
  std::map<std::string, SchemaDb> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    if (!root[i].is_object()) {
      throw FormatError("schema object " + std::to_string(i) + ": not an object");
    }
    SchemaDb db = schema_from_json(root[i], i);
    const std::string id = db.db_id();
    out.insert_or_assign(id, std::move(db));
  }
  return out;
}

std::map<std::string, SchemaDb> load_schemas(const std::filesystem::path& path) {
  try {
    return parse_schemas(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<BenchmarkExample> load_examples(const std::filesystem::path& path, Split split,
                                            const std::map<std::string, SchemaDb>& schemas,
                                            bool strict) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": not valid JSON: " + e.what());
  }
  if (!root.is_array()) throw FormatError(path.string() + ": expected a JSON array");

  std::vector<BenchmarkExample> out;
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto& obj = root[i];
    const std::string where = path.string() + " example " + std::to_string(i);
    BenchmarkExample ex;
    ex.split = split;
    ex.query_id = std::string(split_name(split)) + "_" + std::to_string(i);
    try {
      for (const char* name : {"db_id", "question", "query"}) {
        if (!obj.is_object() || !obj.contains(name)) {
          throw FormatError(where + ": missing field '" + name + "'");
        }
      }
      ex.db_id = obj.at("db_id").get<std::string>();
      ex.nl = obj.at("question").get<std::string>();
      ex.gold_sql = obj.at("query").get<std::string>();
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    auto schema = schemas.find(ex.db_id);
    if (schema == schemas.end()) throw FormatError(where + ": unknown db_id '" + ex.db_id + "'");
    try {
      ex.gold = parse_sql(ex.gold_sql, schema->second);
    } catch (const Error& e) {
      failures.push_back(ex.query_id + ": " + e.what());
    }
    out.push_back(std::move(ex));
  }
  if (strict && !failures.empty()) throw ParseFailureSummary(std::move(failures));
  return out;
}

void write_run_records(const std::filesystem::path& path, const std::vector<RunRecord>& records,
                       bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("cannot write run records to " + path.string());
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<RunRecord> read_run_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read run records from " + path.string());
  std::vector<RunRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(parse_run_record(line));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path) {
  std::vector<Demonstration> out;
  try {
    const json root = json::parse(read_file(path));
    if (!root.is_array()) throw FormatError(path.string() + ": expected a JSON array");
    for (std::size_t i = 0; i < root.size(); ++i) {
      const auto& obj = root[i];
      Demonstration d;
      d.schema_text = obj.at("schema").get<std::string>();
      d.nl = obj.at("question").get<std::string>();
      d.metadata = parse_metadata(obj.at("metadata").get<std::string>());
      d.sql = obj.at("sql").get<std::string>();
      out.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace metasql
