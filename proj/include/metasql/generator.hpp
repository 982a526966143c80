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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metasql/metadata.hpp"
#include "metasql/schema.hpp"
#include "metasql/sql_ast.hpp"
#include "metasql/transcript.hpp"

namespace metasql {

struct Demonstration {
  std::string schema_text;  // already rendered, e.g. "Table Player with columns 'pID';"
  std::string nl;
  QueryMetadata metadata;
  std::string sql;
};

inline constexpr std::size_t kDefaultDemoCount = 9;

struct GenerationRequest {
  std::string query_id;
  std::string nl;
  const SchemaDb* schema = nullptr;
  QueryMetadata metadata;
  std::vector<Demonstration> demos;
  std::size_t decode_width = 1;
};

struct PromptOptions {
  bool include_foreign_keys = false;
};

// "Table <name> with columns '<c1>', '<c2>';" per table, space separated.
std::string render_prompt_schema(const SchemaDb& schema, PromptOptions options = {});

// "The target SQL only uses the following SQL keywords: ...; The difficulty
// rating of the target SQL is N;"
std::string metadata_sentence(const QueryMetadata& metadata);

std::string build_prompt(const GenerationRequest& request, PromptOptions options = {});

// flatten_metadata(m) + " " + nl, the input of a metadata-conditioned
// sequence-to-sequence model.
std::string build_prefixed_input(std::string_view nl, const QueryMetadata& metadata);

// First SQL statement of a model completion: code fences and leading prose
// dropped, cut at the first top-level semicolon.
std::string extract_sql(std::string_view completion);

struct Candidate {
  std::string sql_text;
  std::optional<SqlQuery> ast;  // empty when the text failed to parse
  std::string parse_error;
  QueryMetadata condition;
  std::string backend_id;

  bool parsed() const { return ast.has_value(); }
};

// Parses leniently and records the failure instead of throwing.
Candidate make_candidate(std::string sql_text, const SchemaDb& schema, QueryMetadata condition,
                         std::string backend_id);

// Implementations must be safe for concurrent calls.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string id() const = 0;
  // At most request.decode_width candidates. Throws BackendError.
  virtual std::vector<Candidate> generate(const GenerationRequest& request) const = 0;
};

// Tab-separated rows: query id, flattened metadata, SQL text. Several rows
// may share a key; they are returned in file order.
class FixtureGenerator final : public Generator {
 public:
  explicit FixtureGenerator(const std::filesystem::path& path, bool strict = false);
  std::string id() const override { return "fixture"; }
  std::vector<Candidate> generate(const GenerationRequest& request) const override;

 private:
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> rows_;
  bool strict_;
};

// Chat-completion style HTTP service. In replay mode no network call is made
// and no credential is needed.
class ServiceGenerator final : public Generator {
 public:
  ServiceGenerator(ServiceConfig config, std::shared_ptr<Transcript> transcript,
                   PromptOptions prompt_options = {});
  std::string id() const override { return "service:" + config_.model; }
  std::vector<Candidate> generate(const GenerationRequest& request) const override;

 private:
  ServiceConfig config_;
  std::shared_ptr<Transcript> transcript_;
  PromptOptions prompt_options_;
  std::string credential_;
};

struct GenerateAllOptions {
  std::string query_id;
  std::vector<Demonstration> demos;
  std::size_t decode_width = 1;
  std::size_t parallelism = 1;
};

struct GenerationResult {
  std::vector<Candidate> candidates;
  std::vector<std::string> errors;  // one per failed condition
};

// One generate call per condition, concatenated in condition order and
// de-duplicated on the canonical form (first occurrence wins). Failed
// conditions are reported in `errors` alongside the partial result.
GenerationResult generate_all(std::string_view nl, const SchemaDb& schema,
                              const std::vector<QueryMetadata>& conditions,
                              const Generator& backend, const GenerateAllOptions& options = {});

}  // namespace metasql
