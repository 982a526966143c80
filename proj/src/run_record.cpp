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

#include "metasql/run_record.hpp"

#include <json.hpp>

#include "metasql/error.hpp"

namespace metasql {

using nlohmann::json;

std::string to_json_line(const RunRecord& r) {
  json j;
  j["query_id"] = r.query_id;
  j["db_id"] = r.db_id;
  j["nl"] = r.nl;
  j["gold_sql"] = r.gold_sql ? json(*r.gold_sql) : json(nullptr);
  j["predictions"] = json::array();
  for (const auto& p : r.predictions) j["predictions"].push_back({{"label", p.label}, {"score", p.score}});
  j["selected_labels"] = r.selected_labels;
  j["compositions"] = r.compositions;
  j["candidates"] = json::array();
  for (const auto& c : r.candidates) {
    j["candidates"].push_back({{"sql", c.sql},
                               {"condition", c.condition},
                               {"backend", c.backend},
                               {"parsed", c.parsed},
                               {"error", c.error}});
  }
  j["stage1"] = json::array();
  for (const auto& s : r.stage1) j["stage1"].push_back({{"candidate", s.candidate}, {"score", s.score}});
  j["ranked"] = json::array();
  for (const auto& e : r.ranked) {
    j["ranked"].push_back({{"candidate", e.candidate},
                           {"sql", e.sql},
                           {"stage1_score", e.stage1_score},
                           {"global_score", e.global_score},
                           {"phrase_scores", e.phrase_scores},
                           {"final_score", e.final_score}});
  }
  j["chosen_sql"] = r.chosen_sql ? json(*r.chosen_sql) : json(nullptr);
  j["errors"] = r.errors;
  return j.dump();
}

RunRecord parse_run_record(std::string_view line) {
  RunRecord r;
  try {
    const json j = json::parse(line);
    r.query_id = j.at("query_id").get<std::string>();
    r.db_id = j.at("db_id").get<std::string>();
    r.nl = j.at("nl").get<std::string>();
    if (!j.at("gold_sql").is_null()) r.gold_sql = j.at("gold_sql").get<std::string>();
    for (const auto& p : j.at("predictions")) {
      r.predictions.push_back({p.at("label").get<std::string>(), p.at("score").get<double>()});
    }
    r.selected_labels = j.at("selected_labels").get<std::vector<std::string>>();
    r.compositions = j.at("compositions").get<std::vector<std::string>>();
    for (const auto& c : j.at("candidates")) {
      r.candidates.push_back({c.at("sql").get<std::string>(), c.at("condition").get<std::string>(),
                              c.at("backend").get<std::string>(), c.at("parsed").get<bool>(),
                              c.at("error").get<std::string>()});
    }
    for (const auto& s : j.at("stage1")) {
      r.stage1.push_back({s.at("candidate").get<std::size_t>(), s.at("score").get<double>()});
    }
    for (const auto& e : j.at("ranked")) {
      r.ranked.push_back({e.at("candidate").get<std::size_t>(), e.at("sql").get<std::string>(),
                          e.at("stage1_score").get<double>(), e.at("global_score").get<double>(),
                          e.at("phrase_scores").get<std::vector<double>>(),
                          e.at("final_score").get<double>()});
    }
    if (!j.at("chosen_sql").is_null()) r.chosen_sql = j.at("chosen_sql").get<std::string>();
    r.errors = j.at("errors").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed run record: ") + e.what());
  }
  return r;
}

}  // namespace metasql
