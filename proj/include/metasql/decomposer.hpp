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
#include <string_view>
#include <utility>
#include <vector>

#include "metasql/schema.hpp"
#include "metasql/sql_ast.hpp"

namespace metasql {

enum class UnitType { kProjection, kJoin, kPredicate, kGroup, kSort };

std::string_view unit_type_name(UnitType type);

// A typed piece of a query. The fragment is a SqlQuery holding only the
// clauses the unit describes plus the FROM clause for entity lookup; a set
// operation arm is carried in fragment.set_op.
struct PhraseUnit {
  UnitType type = UnitType::kProjection;
  SqlQuery fragment;
  std::string fragment_text;
  std::string nl_text;
  bool fallback = false;  // nl_text is the raw fragment because no template fit
};

// Templates keyed by (unit type, pattern name). Slots are written {name}.
class TemplateCatalog {
 public:
  static const TemplateCatalog& builtin();
  // Tab-separated lines: type, pattern, template. Entries override the
  // built-in catalog. Throws FormatError.
  static TemplateCatalog load(const std::filesystem::path& path);

  // Throws TemplateGap when absent.
  const std::string& get(UnitType type, std::string_view pattern) const;
  void set(UnitType type, std::string pattern, std::string text);
  std::size_t size() const { return templates_.size(); }
  const std::map<std::pair<UnitType, std::string>, std::string>& entries() const {
    return templates_;
  }

 private:
  std::map<std::pair<UnitType, std::string>, std::string> templates_;
};

// Ordered Projection, Join, Predicate, Group, Sort. Units whose rendering
// hits a TemplateGap fall back to their raw fragment text.
std::vector<PhraseUnit> decompose(const SqlQuery& query, const SchemaDb& schema,
                                  const TemplateCatalog& catalog = TemplateCatalog::builtin());

// Throws TemplateGap when no template fits the fragment shape.
std::string render_unit_nl(UnitType type, const SqlQuery& fragment, const SchemaDb& schema,
                           const TemplateCatalog& catalog = TemplateCatalog::builtin());

}  // namespace metasql
