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
#include <utility>
#include <vector>

namespace metasql {

struct TableInfo {
  std::string name;          // original name as stored in the database
  std::string natural_name;  // human readable name
};

struct ColumnInfo {
  int table = -1;  // -1 only for the star pseudo-column
  std::string name;
  std::string natural_name;
  std::string type = "text";
};

// A database schema: tables, columns and key pairs. Column 0 is always the
// star pseudo-column.
class SchemaDb {
 public:
  SchemaDb() = default;
  // Throws FormatError when a key pair or table index is out of range.
  SchemaDb(std::string db_id, std::vector<TableInfo> tables, std::vector<ColumnInfo> columns,
           std::vector<int> primary_keys, std::vector<std::pair<int, int>> foreign_keys);

  const std::string& db_id() const { return db_id_; }
  const std::vector<TableInfo>& tables() const { return tables_; }
  const std::vector<ColumnInfo>& columns() const { return columns_; }
  const std::vector<int>& primary_keys() const { return primary_keys_; }
  const std::vector<std::pair<int, int>>& foreign_keys() const { return foreign_keys_; }

  // Case-insensitive lookups.
  std::optional<std::size_t> find_table(std::string_view name) const;
  std::optional<std::size_t> find_column(std::size_t table, std::string_view name) const;

  std::vector<std::size_t> columns_of(std::size_t table) const;

  // Natural-language names, falling back to the original name with
  // underscores replaced by spaces.
  std::string table_natural_name(std::string_view table_name) const;
  std::string column_natural_name(std::string_view table_name, std::string_view column) const;

 private:
  std::string db_id_;
  std::vector<TableInfo> tables_;
  std::vector<ColumnInfo> columns_;
  std::vector<int> primary_keys_;
  std::vector<std::pair<int, int>> foreign_keys_;
};

}  // namespace metasql
