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

#include "metasql/schema.hpp"

#include <algorithm>

#include "metasql/error.hpp"
#include "strings.hpp"

namespace metasql {

namespace {

std::string humanize(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace

SchemaDb::SchemaDb(std::string db_id, std::vector<TableInfo> tables,
                   std::vector<ColumnInfo> columns, std::vector<int> primary_keys,
                   std::vector<std::pair<int, int>> foreign_keys)
    : db_id_(std::move(db_id)),
      tables_(std::move(tables)),
      columns_(std::move(columns)),
      primary_keys_(std::move(primary_keys)),
      foreign_keys_(std::move(foreign_keys)) {
  if (columns_.empty() || columns_.front().name != "*") {
    columns_.insert(columns_.begin(), ColumnInfo{-1, "*", "*", "text"});
  }
  const int n_tables = static_cast<int>(tables_.size());
  const int n_cols = static_cast<int>(columns_.size());
  for (std::size_t i = 1; i < columns_.size(); ++i) {
    if (columns_[i].table < 0 || columns_[i].table >= n_tables) {
      throw FormatError(db_id_ + ": column " + std::to_string(i) + " has table index " +
                        std::to_string(columns_[i].table) + " out of range");
    }
  }
  for (int pk : primary_keys_) {
    if (pk < 0 || pk >= n_cols) {
      throw FormatError(db_id_ + ": primary key column " + std::to_string(pk) + " out of range");
    }
  }
  for (const auto& [a, b] : foreign_keys_) {
    if (a < 0 || a >= n_cols || b < 0 || b >= n_cols) {
      throw FormatError(db_id_ + ": foreign key (" + std::to_string(a) + ", " +
                        std::to_string(b) + ") references a missing column");
    }
  }
}

std::optional<std::size_t> SchemaDb::find_table(std::string_view name) const {
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (detail::iequals(tables_[i].name, name)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> SchemaDb::find_column(std::size_t table, std::string_view name) const {
  for (std::size_t i = 1; i < columns_.size(); ++i) {
    if (columns_[i].table == static_cast<int>(table) && detail::iequals(columns_[i].name, name)) {
      return i;
    }
  }
  return std::nullopt;
}

std::vector<std::size_t> SchemaDb::columns_of(std::size_t table) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < columns_.size(); ++i) {
    if (columns_[i].table == static_cast<int>(table)) out.push_back(i);
  }
  return out;
}

std::string SchemaDb::table_natural_name(std::string_view table_name) const {
  if (auto t = find_table(table_name)) {
    const auto& info = tables_[*t];
    return info.natural_name.empty() ? humanize(info.name) : info.natural_name;
  }
  return humanize(table_name);
}

std::string SchemaDb::column_natural_name(std::string_view table_name,
                                          std::string_view column) const {
  if (column == "*") return "*";
  if (auto t = find_table(table_name)) {
    if (auto c = find_column(*t, column)) {
      const auto& info = columns_[*c];
      return info.natural_name.empty() ? humanize(info.name) : info.natural_name;
    }
  }
  return humanize(column);
}

}  // namespace metasql
