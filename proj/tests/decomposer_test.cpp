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

#include <gtest/gtest.h>

#include "metasql/decomposer.hpp"
#include "metasql/error.hpp"
#include "support.hpp"

namespace metasql {
namespace {

using testing::parse;
using testing::schema;
using testing::TempDir;
using testing::write_text;

const SchemaDb& emp() { return schema("employee_hire_evaluation"); }

std::vector<PhraseUnit> units(const std::string& sql) {
  return decompose(parse(sql, "employee_hire_evaluation"), emp());
}

const PhraseUnit* find_unit(const std::vector<PhraseUnit>& us, UnitType type) {
  for (const auto& u : us) {
    if (u.type == type) return &u;
  }
  return nullptr;
}

TEST(Decompose, ProjectionAndSingleTable) {
  const auto us = units("SELECT employee.name FROM employee");
  ASSERT_EQ(us.size(), 2u);
  EXPECT_EQ(us[0].type, UnitType::kProjection);
  EXPECT_EQ(us[0].nl_text, "Find the employee name.");
  EXPECT_EQ(us[1].type, UnitType::kJoin);
  EXPECT_EQ(us[1].nl_text, "Employee");
  EXPECT_FALSE(us[0].fallback);
}

TEST(Decompose, JoinAndSort) {
  const auto us = units(
      "SELECT employee.name FROM employee JOIN evaluation ON employee.id = evaluation.employee_id "
      "ORDER BY evaluation.bonus DESC LIMIT 1");
  ASSERT_EQ(us.size(), 3u);
  EXPECT_EQ(us[1].nl_text, "The employee with evaluation.");
  EXPECT_EQ(us[2].type, UnitType::kSort);
  EXPECT_EQ(us[2].nl_text, "The highest one time bonus.");
}

TEST(Decompose, EqualityPredicateOnName) {
  const auto us = units("SELECT name FROM employee WHERE name = 'John'");
  const PhraseUnit* p = find_unit(us, UnitType::kPredicate);
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->nl_text, "The employee named John.");
}

TEST(Decompose, IntersectArm) {
  const auto us = units("SELECT name FROM employee INTERSECT SELECT id FROM employee WHERE name = 'John'");
  const PhraseUnit* p = find_unit(us, UnitType::kPredicate);
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->nl_text, "(Find the ID of) the employee named John");
  EXPECT_TRUE(p->fragment.set_op.has_value());
}

TEST(Decompose, GroupHasItsOwnTemplate) {
  const auto us = units("SELECT city, count(*) FROM employee GROUP BY city HAVING count(*) > 1");
  ASSERT_EQ(us.size(), 4u);
  EXPECT_EQ(us[0].type, UnitType::kProjection);
  EXPECT_EQ(us[1].type, UnitType::kJoin);
  EXPECT_EQ(us[2].type, UnitType::kPredicate);
  EXPECT_EQ(us[3].type, UnitType::kGroup);
  EXPECT_EQ(us[3].nl_text.rfind("For each ", 0), 0u);
  EXPECT_NE(us[3].nl_text, us[0].nl_text);
}

TEST(Decompose, OneUnitPerConjunct) {
  const auto us = units("SELECT name FROM employee WHERE age > 30 AND city = 'Bath'");
  std::size_t predicates = 0;
  for (const auto& u : us) predicates += u.type == UnitType::kPredicate;
  EXPECT_EQ(predicates, 2u);
}

TEST(Decompose, MinimalQueryHasTwoUnits) {
  EXPECT_EQ(units("SELECT name FROM shop").size(), 2u);
}

TEST(Decompose, DerivedTableFallsBackToRawText) {
  const auto us = units("SELECT name FROM (SELECT name FROM employee)");
  ASSERT_FALSE(us.empty());
  for (const auto& u : us) {
    EXPECT_TRUE(u.fallback);
    EXPECT_EQ(u.nl_text, u.fragment_text);
  }
}

TEST(Decompose, DeepNestingIsATemplateGap) {
  const SqlQuery q = parse(
      "SELECT name FROM employee WHERE age > (SELECT avg(age) FROM employee WHERE id IN (SELECT "
      "employee_id FROM evaluation))",
      "employee_hire_evaluation");
  const auto us = decompose(q, emp());
  const PhraseUnit* p = find_unit(us, UnitType::kPredicate);
  ASSERT_NE(p, nullptr);
  EXPECT_TRUE(p->fallback);
  EXPECT_THROW(render_unit_nl(UnitType::kPredicate, p->fragment, emp()), TemplateGap);
}

TEST(TemplateCatalog, BuiltinAndOverride) {
  const auto& builtin = TemplateCatalog::builtin();
  EXPECT_GE(builtin.size(), 14u);
  EXPECT_THROW(builtin.get(UnitType::kSort, "no-such-pattern"), TemplateGap);

  TempDir dir;
  std::string pattern;
  for (const auto& [key, text] : builtin.entries()) {
    if (key.first == UnitType::kProjection) {
      pattern = key.second;
      break;
    }
  }
  ASSERT_FALSE(pattern.empty());
  write_text(dir.path() / "t.tsv", "Projection\t" + pattern + "\tShow the {columns}.\n");
  const auto catalog = TemplateCatalog::load(dir.path() / "t.tsv");
  EXPECT_EQ(catalog.size(), builtin.size());
  EXPECT_EQ(catalog.get(UnitType::kProjection, pattern), "Show the {columns}.");
  const auto us = decompose(parse("SELECT name FROM employee", "employee_hire_evaluation"), emp(),
                            catalog);
  EXPECT_EQ(us[0].nl_text, "Show the employee name.");

  write_text(dir.path() / "bad.tsv", "Nonsense\tx\ty\n");
  EXPECT_THROW(TemplateCatalog::load(dir.path() / "bad.tsv"), FormatError);
}

}  // namespace
}  // namespace metasql
