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

#include "metasql/generator.hpp"

#include <fstream>
#include <set>

#include "metasql/error.hpp"
#include "parallel.hpp"
#include "strings.hpp"

namespace metasql {

namespace {

constexpr std::string_view kInstruction =
    "#### Give you database schema, NL question, and metadata information of the target SQL, "
    "generate an SQL query.";
constexpr std::string_view kDemoHeader = "#### Learn from the generating examples:";
constexpr std::string_view kInferenceHeader =
    "#### Please follow the previous example and help me generate the following SQL statement:";
constexpr std::string_view kTargetLine = "#### The target SQL is:";

std::string column_ref_name(const SchemaDb& schema, int column) {
  const auto& c = schema.columns()[static_cast<std::size_t>(column)];
  return schema.tables()[static_cast<std::size_t>(c.table)].name + "." + c.name;
}

}  // namespace

std::string render_prompt_schema(const SchemaDb& schema, PromptOptions options) {
  std::vector<std::string> parts;
  for (std::size_t t = 0; t < schema.tables().size(); ++t) {
    std::vector<std::string> cols;
    for (auto c : schema.columns_of(t)) cols.push_back("'" + schema.columns()[c].name + "'");
    parts.push_back("Table " + schema.tables()[t].name + " with columns " +
                    detail::join(cols, ", ") + ";");
  }
  if (options.include_foreign_keys && !schema.foreign_keys().empty()) {
    std::vector<std::string> keys;
    for (const auto& [from, to] : schema.foreign_keys()) {
      keys.push_back(column_ref_name(schema, from) + " = " + column_ref_name(schema, to));
    }
    parts.push_back("Foreign keys: " + detail::join(keys, ", ") + ";");
  }
  return detail::join(parts, " ");
}

std::string metadata_sentence(const QueryMetadata& metadata) {
  std::vector<std::string> keywords;
  for (auto t : metadata.tags.to_vector()) {
    if (t == OperatorTag::kProject || t == OperatorTag::kAgg) continue;
    keywords.push_back(detail::to_upper(tag_name(t)));
  }
  if (keywords.empty()) keywords.emplace_back("SELECT");
  return "The target SQL only uses the following SQL keywords: " + detail::join(keywords, ", ") +
         "; The difficulty rating of the target SQL is " + std::to_string(metadata.hardness) + ";";
}

std::string build_prompt(const GenerationRequest& request, PromptOptions options) {
  std::string out(kInstruction);
  if (!request.demos.empty()) {
    out += "\n\n";
    out += kDemoHeader;
    bool first = true;
    for (const auto& d : request.demos) {
      out += first ? "\n" : "\n\n";
      first = false;
      out += "Schema: " + d.schema_text + "\n";
      out += "Question: " + d.nl + ";\n";
      out += metadata_sentence(d.metadata) + "\n";
      out += std::string(kTargetLine) + "\n";
      out += d.sql;
    }
  }
  out += "\n\n";
  out += kInferenceHeader;
  out += "\nSchema: " + (request.schema ? render_prompt_schema(*request.schema, options) : "");
  out += "\nQuestion: " + request.nl;
  out += "\n" + metadata_sentence(request.metadata);
  out += "\n";
  out += kTargetLine;
  return out;
}

std::string build_prefixed_input(std::string_view nl, const QueryMetadata& metadata) {
  return flatten_metadata(metadata) + " " + std::string(nl);
}

std::string extract_sql(std::string_view completion) {
  std::string_view text = completion;
  if (auto fence = text.find("```"); fence != std::string_view::npos) {
    auto body = text.find('\n', fence);
    if (body != std::string_view::npos) {
      auto close = text.find("```", body);
      text = text.substr(body + 1, close == std::string_view::npos ? std::string_view::npos
                                                                   : close - body - 1);
    }
  }
  const std::string lower = detail::to_lower(text);
  for (std::size_t pos = lower.find("select"); pos != std::string::npos;
       pos = lower.find("select", pos + 1)) {
    const bool boundary = pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
    if (boundary) {
      text = text.substr(pos);
      break;
    }
  }
  std::string out;
  char quote = 0;
  for (char c : text) {
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ';') {
      break;
    }
    out += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
  }
  return std::string(detail::trim(out));
}

Candidate make_candidate(std::string sql_text, const SchemaDb& schema, QueryMetadata condition,
                         std::string backend_id) {
  Candidate c;
  c.sql_text = std::move(sql_text);
  c.condition = std::move(condition);
  c.backend_id = std::move(backend_id);
  try {
    c.ast = parse_sql(c.sql_text, schema, ParseOptions{.strict = false});
  } catch (const Error& e) {
    c.parse_error = e.what();
  }
  return c;
}

// --- fixture backend -------------------------------------------------------

FixtureGenerator::FixtureGenerator(const std::filesystem::path& path, bool strict)
    : strict_(strict) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read fixture file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, "\t");
    if (fields.size() != 3) {
      throw FormatError("fixture " + path.string() + " line " + std::to_string(line_no) +
                        ": expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const auto normalized = flatten_metadata(parse_metadata(fields[1]));
    rows_[{fields[0], normalized}].push_back(fields[2]);
  }
}

std::vector<Candidate> FixtureGenerator::generate(const GenerationRequest& request) const {
  if (request.schema == nullptr) throw BackendError("generation request without a schema");
  const std::string key = flatten_metadata(request.metadata);
  auto it = rows_.find({request.query_id, key});
  if (it == rows_.end()) {
    if (strict_) {
      throw BackendError("fixture has no entry for query " + request.query_id + " under '" + key +
                         "'");
    }
    return {};
  }
  std::vector<Candidate> out;
  for (const auto& sql : it->second) {
    if (out.size() >= request.decode_width) break;
    out.push_back(make_candidate(sql, *request.schema, request.metadata, id()));
  }
  return out;
}

// --- service backend -------------------------------------------------------

ServiceGenerator::ServiceGenerator(ServiceConfig config, std::shared_ptr<Transcript> transcript,
                                   PromptOptions prompt_options)
    : config_(std::move(config)),
      transcript_(std::move(transcript)),
      prompt_options_(prompt_options) {
  const bool replay = transcript_ && transcript_->mode() == TranscriptMode::kReplay;
  if (!replay) {
    if (config_.endpoint.empty()) throw ConfigError("service generator needs an endpoint");
    credential_ = read_credential(config_.credential_env);
  }
}

std::vector<Candidate> ServiceGenerator::generate(const GenerationRequest& request) const {
  if (request.schema == nullptr) throw BackendError("generation request without a schema");
  const std::string prompt = build_prompt(request, prompt_options_);
  std::vector<std::string> completions;
  if (transcript_ && transcript_->mode() == TranscriptMode::kReplay) {
    for (const auto& j : transcript_->replay(prompt)) {
      if (!j.is_string()) throw BackendError("transcript completion is not a string");
      completions.push_back(j.get<std::string>());
    }
  } else {
    nlohmann::json body = {
        {"model", config_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config_.temperature},
        {"max_tokens", config_.max_tokens},
        {"n", request.decode_width},
    };
    const auto response = post_json(config_.endpoint, body, credential_, config_.timeout_seconds);
    try {
      for (const auto& choice : response.at("choices")) {
        completions.push_back(choice.at("message").at("content").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("unexpected completion response: ") + e.what());
    }
    if (transcript_) {
      for (const auto& c : completions) transcript_->record(prompt, c);
    }
  }
  std::vector<Candidate> out;
  for (const auto& c : completions) {
    if (out.size() >= request.decode_width) break;
    out.push_back(make_candidate(extract_sql(c), *request.schema, request.metadata, id()));
  }
  return out;
}

// --- orchestration ---------------------------------------------------------

GenerationResult generate_all(std::string_view nl, const SchemaDb& schema,
                              const std::vector<QueryMetadata>& conditions,
                              const Generator& backend, const GenerateAllOptions& options) {
  std::vector<std::vector<Candidate>> per_condition(conditions.size());
  std::vector<std::string> failures(conditions.size());
  detail::parallel_for(conditions.size(), options.parallelism, [&](std::size_t i) {
    GenerationRequest req;
    req.query_id = options.query_id;
    req.nl = std::string(nl);
    req.schema = &schema;
    req.metadata = conditions[i];
    req.demos = options.demos;
    req.decode_width = options.decode_width;
    try {
      per_condition[i] = backend.generate(req);
    } catch (const Error& e) {
      failures[i] = flatten_metadata(conditions[i]) + ": " + e.what();
    }
  });

  GenerationResult result;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (!failures[i].empty()) result.errors.push_back(failures[i]);
    for (auto& c : per_condition[i]) {
      const std::string key = c.parsed() ? "ast:" + render_sql(*c.ast)
                                         : "raw:" + std::string(detail::trim(c.sql_text));
      if (seen.insert(key).second) result.candidates.push_back(std::move(c));
    }
  }
  return result;
}

}  // namespace metasql
