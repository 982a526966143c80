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

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "metasql/sql_ast.hpp"

namespace metasql {

enum class ClauseCategory {
  kSelect,
  kFrom,
  kWhere,
  kGroup,
  kHaving,
  kOrderLimit,
  kSetOp,
  kNesting,
};

inline constexpr std::size_t kClauseCategoryCount = 8;

// Penalty weight per category; the weights sum to the label ceiling of 10.
double clause_weight(ClauseCategory category);
std::string_view clause_category_name(ClauseCategory category);

// Value-erased comparable components of each clause category.
struct ClauseComponents {
  std::array<std::vector<std::string>, kClauseCategoryCount> parts;

  const std::vector<std::string>& operator[](ClauseCategory c) const {
    return parts[static_cast<std::size_t>(c)];
  }
};

ClauseComponents clause_components(const SqlQuery& query);

// Matched components over the larger component count (multiset semantics).
// Two empty clauses overlap fully.
double component_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Label in [0, 10]: starts at 10 and subtracts weight * (1 - overlap) per
// clause category, clamped at 0. Symmetric; 10 exactly on exact match.
double clause_similarity(const SqlQuery& candidate, const SqlQuery& gold);

// clause_similarity / 10.
double first_stage_label(const SqlQuery& candidate, const SqlQuery& gold);

struct TrainingTriple {
  std::string query_id;
  std::string nl;
  SqlQuery sql;
  double y = 0.0;
};

// The gold triple (y = 10) first, then one triple per candidate whose
// canonical form differs from every earlier triple.
std::vector<TrainingTriple> build_training_triples(std::string_view query_id, std::string_view nl,
                                                   const SqlQuery& gold,
                                                   const std::vector<SqlQuery>& candidates);

// Tab-separated records: query id, NL, SQL text, y.
void write_training_triples(const std::filesystem::path& path,
                            const std::vector<TrainingTriple>& triples, bool append = false);

}  // namespace metasql
