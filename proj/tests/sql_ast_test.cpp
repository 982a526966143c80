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

#include "metasql/error.hpp"
#include "metasql/sql_ast.hpp"
#include "support.hpp"

namespace metasql {
namespace {

using testing::parse;
using testing::schema;

constexpr const char* kNonEnglishGold =
    "SELECT countrycode FROM CountryLanguage EXCEPT SELECT countrycode FROM CountryLanguage "
    "WHERE language = 'English'";

TEST(SqlParse, ExceptQueryHasWhereOnRightOperand) {
  const SqlQuery q = parse(kNonEnglishGold, "world_1");
  ASSERT_TRUE(q.set_op.has_value());
  EXPECT_EQ(q.set_op->kind, SetOpKind::kExcept);
  EXPECT_FALSE(q.where.has_value());
  const SqlQuery& right = *q.set_op->right;
  ASSERT_TRUE(right.where.has_value());
  ASSERT_EQ(right.where->kind, Predicate::Kind::kLeaf);
  const Comparison& leaf = right.where->leaf;
  EXPECT_EQ(leaf.op, CompareOp::kEq);
  EXPECT_EQ(leaf.lhs.value.left.column()->column, "language");
  EXPECT_EQ(std::get<Literal>(leaf.rhs).text, "English");
}

TEST(SqlParse, AliasedJoinWithAggregateAndGroup) {
  const SqlQuery q = parse(
      "SELECT max(T.HS), T2.pPos FROM player AS T JOIN tryout AS T2 WHERE T.HS > 1000 "
      "GROUP BY T2.pPos",
      "soccer_2");
  ASSERT_EQ(q.select.size(), 2u);
  EXPECT_EQ(q.select[0].agg, Aggregate::kMax);
  EXPECT_EQ(q.select[0].value.left.column()->table, "player");
  EXPECT_EQ(q.select[0].value.left.column()->column, "hs");
  ASSERT_EQ(q.from.tables.size(), 2u);
  EXPECT_EQ(q.from.tables[0].name, "player");
  EXPECT_EQ(q.from.tables[1].name, "tryout");
  ASSERT_EQ(q.group_by.size(), 1u);
  EXPECT_EQ(q.group_by[0], (ColumnRef{"tryout", "ppos", true}));
}

TEST(SqlParse, OnConditionColumnsResolveThroughAliases) {
  const SqlQuery q = parse(
      "SELECT T1.name FROM employee AS T1 JOIN evaluation AS T2 ON T1.id = T2.employee_id",
      "employee_hire_evaluation");
  ASSERT_EQ(q.from.conditions.size(), 1u);
  EXPECT_EQ(q.from.conditions[0].left, (ColumnRef{"employee", "id", true}));
  EXPECT_EQ(q.from.conditions[0].right, (ColumnRef{"evaluation", "employee_id", true}));
}

TEST(SqlParse, RenderReparseIsIdentity) {
  const SqlQuery q = canonicalize(parse(kNonEnglishGold, "world_1"));
  const SqlQuery again = canonicalize(parse(render_sql(q), "world_1"));
  EXPECT_EQ(q, again);
  EXPECT_EQ(render_sql(q), render_sql(again));
}

TEST(SqlParse, CanonicalizeIsIdempotent) {
  for (const char* sql :
       {"SELECT name FROM country WHERE population > 5 AND continent = 'Asia' ORDER BY name",
        "SELECT continent, count(*) FROM country GROUP BY continent HAVING count(*) > 1",
        "SELECT name FROM city WHERE countrycode IN (SELECT code FROM country)"}) {
    const SqlQuery once = canonicalize(parse(sql, "world_1"));
    EXPECT_EQ(canonicalize(once), once) << sql;
  }
}

TEST(SqlParse, EraseValuesHidesLiterals) {
  const SqlQuery q = parse(kNonEnglishGold, "world_1");
  const std::string erased = render_sql(q, RenderOptions{.erase_values = true});
  EXPECT_EQ(erased.find("English"), std::string::npos);
}

TEST(SqlParse, SubqueryInPredicate) {
  const SqlQuery q = parse("SELECT name FROM employee WHERE id NOT IN (SELECT employee_id FROM evaluation)",
                           "employee_hire_evaluation");
  ASSERT_EQ(predicate_subqueries(q).size(), 1u);
  EXPECT_TRUE(q.where->leaf.negated);
  EXPECT_EQ(q.where->leaf.op, CompareOp::kIn);
}

TEST(SqlParse, SyntaxErrorReportsOffsetAndToken) {
  try {
    parse("SELEC name FROM country", "world_1");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 0u);
    EXPECT_EQ(e.token(), "SELEC");
  }
  EXPECT_THROW(parse("SELECT name FROM", "world_1"), SyntaxError);
  EXPECT_THROW(parse("SELECT name FROM country WHERE", "world_1"), SyntaxError);
}

TEST(SqlParse, UnknownIdentifiersStrictAndLenient) {
  EXPECT_THROW(parse("SELECT name FROM nowhere", "world_1"), UnknownTable);
  EXPECT_THROW(parse("SELECT nothing FROM country", "world_1"), UnknownColumn);
  const SqlQuery q =
      parse_sql("SELECT nothing FROM country", schema("world_1"), ParseOptions{.strict = false});
  EXPECT_TRUE(has_unresolved(q));
  const SqlQuery ok = parse("SELECT name FROM country", "world_1");
  EXPECT_FALSE(has_unresolved(ok));
}

TEST(SqlParse, IdentifiersAreCaseInsensitive) {
  EXPECT_EQ(parse("select NAME from COUNTRY where CONTINENT = 'Asia'", "world_1"),
            parse("SELECT name FROM country WHERE continent = 'Asia'", "world_1"));
}

TEST(SqlParse, BlockColumnsStayInBlock) {
  const SqlQuery q = parse("SELECT name FROM employee WHERE id IN (SELECT employee_id FROM evaluation)",
                           "employee_hire_evaluation");
  for (const auto& c : block_columns(q)) EXPECT_EQ(c.table, "employee");
}

}  // namespace
}  // namespace metasql
