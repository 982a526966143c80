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

#include "metasql/schema.hpp"
#include "metasql/sql_ast.hpp"

namespace metasql::testing {

std::filesystem::path data_dir();
std::filesystem::path cli_path();

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

const std::map<std::string, SchemaDb>& schemas();
const SchemaDb& schema(const std::string& db_id);
SqlQuery parse(const std::string& sql, const std::string& db_id);

// Executes tests/data/db/<db_id>.sql into a new SQLite file.
void build_database(const std::string& db_id, const std::filesystem::path& out);

// Spider-layout root: tables.json, dev.json and database/<db>/<db>.sqlite for
// every scripted database.
void build_data_root(const std::filesystem::path& root);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with the given argument string; stdout and stderr captured
// together.
CommandResult run_cli(const std::string& args);

}  // namespace metasql::testing
