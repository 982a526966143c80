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

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <regex>

#include "metasql/similarity.hpp"
#include "support.hpp"

namespace metasql {
namespace {

using testing::parse;
using testing::read_text;
using testing::TempDir;

// Independent oracle over raw text for flat queries (no nesting): split at
// clause keywords, erase literals, compare clause parts as multisets.
struct TextClauses {
  std::map<std::string, std::vector<std::string>> parts;
};

std::string squash(std::string s) {
  s = std::regex_replace(s, std::regex("'[^']*'"), "_");
  s = std::regex_replace(s, std::regex("\\b[0-9]+(\\.[0-9]+)?\\b"), "_");
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

std::vector<std::string> split_on(const std::string& text, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(sep, start)) != std::string::npos; start = pos + sep.size()) {
    out.push_back(text.substr(start, pos - start));
  }
  out.push_back(text.substr(start));
  return out;
}

TextClauses split_clauses(const std::string& sql) {
  TextClauses c;
  std::string body = sql;
  for (const char* op : {" EXCEPT ", " UNION ", " INTERSECT "}) {
    auto pos = body.find(op);
    if (pos != std::string::npos) {
      c.parts["set"] = {std::string("op:") + op, "right:" + squash(body.substr(pos + std::strlen(op)))};
      body = body.substr(0, pos);
    }
  }
  const std::vector<std::string> keys = {"SELECT ", " FROM ", " WHERE ", " GROUP BY ",
                                         " HAVING ", " ORDER BY ", " LIMIT "};
  std::vector<std::pair<std::size_t, std::string>> found;
  for (const auto& k : keys) {
    auto pos = body.find(k);
    if (pos != std::string::npos) found.emplace_back(pos, k);
  }
  std::sort(found.begin(), found.end());
  for (std::size_t i = 0; i < found.size(); ++i) {
    const auto begin = found[i].first + found[i].second.size();
    const auto end = i + 1 < found.size() ? found[i + 1].first : body.size();
    const std::string text = body.substr(begin, end - begin);
    const std::string& k = found[i].second;
    auto& slot = c.parts[k];
    if (k == "SELECT " || k == " GROUP BY ") {
      for (const auto& p : split_on(text, ",")) slot.push_back(squash(p));
    } else if (k == " FROM ") {
      for (const auto& p : split_on(text, " JOIN ")) slot.push_back(squash(p));
    } else if (k == " WHERE " || k == " HAVING ") {
      for (const auto& p : split_on(text, " AND ")) slot.push_back(squash(p));
    } else if (k == " ORDER BY ") {
      slot.push_back(squash(text));
    } else {
      c.parts[" ORDER BY "].push_back("limit");
    }
  }
  return c;
}

double oracle_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t matched = 0;
  for (const auto& x : a) {
    auto it = std::find(b.begin(), b.end(), x);
    if (it != b.end()) {
      ++matched;
      b.erase(it);
    }
  }
  return static_cast<double>(matched) /
         static_cast<double>(std::max(a.size(), b.size() + matched));
}

double oracle_similarity(const std::string& cand, const std::string& gold) {
  const std::vector<std::pair<std::string, double>> weights = {
      {"SELECT ", 2.0}, {" FROM ", 1.5},     {" WHERE ", 2.0}, {" GROUP BY ", 1.0},
      {" HAVING ", 1.0}, {" ORDER BY ", 1.0}, {"set", 1.0}};
  const auto a = split_clauses(cand);
  const auto b = split_clauses(gold);
  double y = 10.0;
  for (const auto& [k, w] : weights) {
    const auto pa = a.parts.count(k) ? a.parts.at(k) : std::vector<std::string>{};
    const auto pb = b.parts.count(k) ? b.parts.at(k) : std::vector<std::string>{};
    y -= w * (1.0 - oracle_overlap(pa, pb));
  }
  return std::max(0.0, y);
}

struct Pair {
  const char* db;
  const char* candidate;
  const char* gold;
};

const Pair kPairs[] = {
    {"world_1", "SELECT countrycode FROM countrylanguage WHERE language != 'value'",
     "SELECT countrycode FROM countrylanguage EXCEPT SELECT countrycode FROM countrylanguage "
     "WHERE language = 'English'"},
    {"pets_1", "SELECT student.lname FROM student JOIN has_pet JOIN pets WHERE pets.pet_age = 3",
     "SELECT student.lname FROM student JOIN has_pet JOIN pets WHERE pets.pettype = 'cat' AND "
     "pets.pet_age = 3"},
    {"pets_1", "SELECT student.lname FROM student JOIN pets WHERE pets.pettype = 'cat' AND "
               "pets.pet_age = 3",
     "SELECT student.lname FROM student JOIN has_pet JOIN pets WHERE pets.pettype = 'cat' AND "
     "pets.pet_age = 3"},
    {"pets_1", "SELECT student.lname, pets.pettype FROM student JOIN has_pet JOIN pets WHERE "
               "pets.pet_age = 3 AND pets.pettype = 'cat'",
     "SELECT student.lname FROM student JOIN has_pet JOIN pets WHERE pets.pettype = 'cat' AND "
     "pets.pet_age = 3"},
    {"world_1", "SELECT country.name FROM country ORDER BY country.population DESC LIMIT 1",
     "SELECT country.name FROM country ORDER BY country.population DESC"},
    {"world_1", "SELECT country.continent, count(*) FROM country GROUP BY country.continent",
     "SELECT country.continent FROM country GROUP BY country.continent HAVING count(*) > 2"},
    {"world_1", "SELECT city.name FROM city WHERE city.population > 10",
     "SELECT country.name FROM country WHERE country.population > 5000"},
};

TEST(ClauseSimilarity, MatchesTextOracle) {
  for (const auto& p : kPairs) {
    const double expected = oracle_similarity(p.candidate, p.gold);
    EXPECT_NEAR(clause_similarity(parse(p.candidate, p.db), parse(p.gold, p.db)), expected, 1e-9)
        << p.candidate;
  }
}

TEST(ClauseSimilarity, NearMissAgainstGold) {
  const double y = clause_similarity(parse(kPairs[0].candidate, "world_1"),
                                     parse(kPairs[0].gold, "world_1"));
  EXPECT_DOUBLE_EQ(y, oracle_similarity(kPairs[0].candidate, kPairs[0].gold));
  EXPECT_GT(y, 0.0);
  EXPECT_LT(y, 10.0);
}

TEST(ClauseSimilarity, IdentitySymmetryBounds) {
  for (const auto& p : kPairs) {
    const auto a = parse(p.candidate, p.db);
    const auto b = parse(p.gold, p.db);
    EXPECT_EQ(clause_similarity(a, a), 10.0);
    EXPECT_EQ(clause_similarity(a, b), clause_similarity(b, a));
    const double y = clause_similarity(a, b);
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 10.0);
    EXPECT_DOUBLE_EQ(first_stage_label(a, b), y / 10.0);
  }
}

TEST(ClauseSimilarity, LiteralsAreIgnored) {
  EXPECT_EQ(clause_similarity(parse("SELECT name FROM country WHERE continent = 'Asia'", "world_1"),
                              parse("SELECT name FROM country WHERE continent = 'Europe'", "world_1")),
            10.0);
}

TEST(ClauseSimilarity, WeightsSumToTen) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kClauseCategoryCount; ++i) {
    sum += clause_weight(static_cast<ClauseCategory>(i));
  }
  EXPECT_DOUBLE_EQ(sum, 10.0);
}

TEST(ComponentOverlap, MultisetSemantics) {
  EXPECT_EQ(component_overlap({}, {}), 1.0);
  EXPECT_EQ(component_overlap({"a"}, {}), 0.0);
  EXPECT_EQ(component_overlap({"a", "a"}, {"a"}), 0.5);
  EXPECT_EQ(component_overlap({"a", "b"}, {"b", "a"}), 1.0);
}

TEST(TrainingTriples, GoldFirstAndDeduplicated) {
  const auto gold = parse(kPairs[0].gold, "world_1");
  const auto top1 = parse(kPairs[0].candidate, "world_1");
  const auto triples = build_training_triples("q0", "nl", gold, {top1, gold, top1});
  ASSERT_EQ(triples.size(), 2u);
  EXPECT_EQ(triples[0].y, 10.0);
  EXPECT_DOUBLE_EQ(triples[1].y, clause_similarity(top1, gold));

  TempDir dir;
  write_training_triples(dir.path() / "t.tsv", triples);
  const std::string text = read_text(dir.path() / "t.tsv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.rfind("q0\tnl\t", 0), 0u);
}

}  // namespace
}  // namespace metasql
