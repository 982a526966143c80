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

#include "support.hpp"

#include <sqlite3.h>
#include <sys/wait.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "metasql/corpus.hpp"

namespace metasql::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return METASQL_TEST_DATA_DIR; }
fs::path cli_path() { return METASQL_CLI_PATH; }

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (;;) {
    path_ = fs::temp_directory_path() /
            ("metasql-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

const std::map<std::string, SchemaDb>& schemas() {
  static const auto all = load_schemas(data_dir() / "tables.json");
  return all;
}

const SchemaDb& schema(const std::string& db_id) { return schemas().at(db_id); }

SqlQuery parse(const std::string& sql, const std::string& db_id) {
  return parse_sql(sql, schema(db_id));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void build_database(const std::string& db_id, const fs::path& out) {
  const std::string script = read_text(data_dir() / "db" / (db_id + ".sql"));
  fs::remove(out);
  sqlite3* db = nullptr;
  if (sqlite3_open(out.string().c_str(), &db) != SQLITE_OK) {
    sqlite3_close(db);
    throw std::runtime_error("cannot create " + out.string());
  }
  char* err = nullptr;
  const int rc = sqlite3_exec(db, script.c_str(), nullptr, nullptr, &err);
  std::string message = err ? err : "";
  sqlite3_free(err);
  sqlite3_close(db);
  if (rc != SQLITE_OK) throw std::runtime_error(db_id + ".sql: " + message);
}

void build_data_root(const fs::path& root) {
  fs::create_directories(root);
  fs::copy_file(data_dir() / "tables.json", root / "tables.json",
                fs::copy_options::overwrite_existing);
  fs::copy_file(data_dir() / "bench" / "dev.json", root / "dev.json",
                fs::copy_options::overwrite_existing);
  for (const auto& entry : fs::directory_iterator(data_dir() / "db")) {
    if (entry.path().extension() != ".sql") continue;
    const std::string db_id = entry.path().stem().string();
    fs::create_directories(root / "database" / db_id);
    build_database(db_id, root / "database" / db_id / (db_id + ".sqlite"));
  }
}

CommandResult run_cli(const std::string& args) {
  const std::string command = "'" + cli_path().string() + "' " + args + " 2>&1";
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace metasql::testing
