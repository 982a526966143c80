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

#include <atomic>

#include "metasql/error.hpp"
#include "metasql/generator.hpp"
#include "support.hpp"

namespace metasql {
namespace {

using testing::schema;
using testing::TempDir;
using testing::write_text;

constexpr const char* kNonEnglishNl = "What are the country codes for countries that do not speak English?";

Demonstration soccer_demo() {
  Demonstration d;
  d.schema_text =
      "Table Player with columns 'pID', 'pName', 'yCard', 'HS'; Table Tryout with columns 'pID', "
      "'cName', 'pPos', 'decision';";
  d.nl = "For each position, what is the maximum number of hours for students who spent more "
         "than 1000 hours training?";
  d.metadata = {Correctness::kCorrect, 350,
                TagSet{OperatorTag::kProject, OperatorTag::kJoin, OperatorTag::kWhere,
                       OperatorTag::kGroup, OperatorTag::kAgg}};
  d.sql = "SELECT max(T.HS),T2.pPos FROM player AS T JOIN tryout AS T2 WHERE T.HS>1000 GROUP BY "
          "T2.pPos";
  return d;
}

GenerationRequest conductor_request() {
  GenerationRequest r;
  r.query_id = "q";
  r.nl = "Return the names of conductors that do not have the nationality \"USA\".";
  r.schema = &schema("orchestra");
  r.metadata = {Correctness::kCorrect, 100, TagSet{OperatorTag::kProject, OperatorTag::kWhere}};
  r.demos = {soccer_demo()};
  return r;
}

TEST(Prompt, ReferenceLayout) {
  const std::string expected =
      "#### Give you database schema, NL question, and metadata information of the target SQL, "
      "generate an SQL query.\n"
      "\n"
      "#### Learn from the generating examples:\n"
      "Schema: Table Player with columns 'pID', 'pName', 'yCard', 'HS'; Table Tryout with columns "
      "'pID', 'cName', 'pPos', 'decision';\n"
      "Question: For each position, what is the maximum number of hours for students who spent "
      "more than 1000 hours training?;\n"
      "The target SQL only uses the following SQL keywords: JOIN, WHERE, GROUP; The difficulty "
      "rating of the target SQL is 350;\n"
      "#### The target SQL is:\n"
      "SELECT max(T.HS),T2.pPos FROM player AS T JOIN tryout AS T2 WHERE T.HS>1000 GROUP BY "
      "T2.pPos\n"
      "\n"
      "#### Please follow the previous example and help me generate the following SQL statement:\n"
      "Schema: Table conductor with columns 'Conductor_ID', 'Name', 'Age', 'Nationality', "
      "'Year_of_Work'; Table orchestra with columns 'Orchestra_ID', 'Orchestra', 'Conductor_ID', "
      "'Record_Company', 'Year_of_Founded';\n"
      "Question: Return the names of conductors that do not have the nationality \"USA\".\n"
      "The target SQL only uses the following SQL keywords: WHERE; The difficulty rating of the "
      "target SQL is 100;\n"
      "#### The target SQL is:";
  EXPECT_EQ(build_prompt(conductor_request()), expected);
}

TEST(Prompt, DemosAreSeparatedByBlankLines) {
  GenerationRequest r = conductor_request();
  r.demos.push_back(soccer_demo());
  const std::string p = build_prompt(r);
  const std::string joint = "GROUP BY T2.pPos\n\nSchema: Table Player";
  EXPECT_NE(p.find(joint), std::string::npos);
}

TEST(Prompt, NoDemosOmitsDemoSection) {
  GenerationRequest r = conductor_request();
  r.demos.clear();
  const std::string p = build_prompt(r);
  EXPECT_EQ(p.find("Learn from"), std::string::npos);
  EXPECT_EQ(p.rfind("#### The target SQL is:"), p.size() - 23);
}

TEST(Prompt, SchemaRendering) {
  const std::string s = render_prompt_schema(schema("soccer_2"));
  EXPECT_NE(s.find("Table Player with columns 'pID', 'pName', 'yCard', 'HS'; Table Tryout with "
                   "columns 'pID', 'cName', 'pPos', 'decision';"),
            std::string::npos);
  EXPECT_EQ(s.find("Foreign keys"), std::string::npos);
  const std::string fk = render_prompt_schema(schema("orchestra"), {.include_foreign_keys = true});
  EXPECT_NE(fk.find("Foreign keys: orchestra.Conductor_ID = conductor.Conductor_ID;"),
            std::string::npos);
}

TEST(Prompt, MetadataSentenceKeywords) {
  EXPECT_EQ(metadata_sentence({Correctness::kCorrect, 400,
                               TagSet{OperatorTag::kProject, OperatorTag::kExcept}}),
            "The target SQL only uses the following SQL keywords: EXCEPT; The difficulty rating "
            "of the target SQL is 400;");
  EXPECT_EQ(metadata_sentence({Correctness::kCorrect, 100, TagSet{OperatorTag::kProject}}),
            "The target SQL only uses the following SQL keywords: SELECT; The difficulty rating "
            "of the target SQL is 100;");
}

TEST(PrefixedInput, NonEnglishQuestion) {
  EXPECT_EQ(build_prefixed_input(kNonEnglishNl, {Correctness::kCorrect, 400,
                                           TagSet{OperatorTag::kProject, OperatorTag::kExcept}}),
            "correct | rating:400 | tags:project,except What are the country codes for countries "
            "that do not speak English?");
}

TEST(ExtractSql, CompletionShapes) {
  EXPECT_EQ(extract_sql("SELECT name FROM country;"), "SELECT name FROM country");
  EXPECT_EQ(extract_sql("Here it is:\n```sql\nSELECT name\nFROM country\n```\nDone."),
            "SELECT name FROM country");
  EXPECT_EQ(extract_sql("SELECT name FROM country WHERE name = 'a;b'; SELECT 1"),
            "SELECT name FROM country WHERE name = 'a;b'");
  EXPECT_EQ(extract_sql("The query reselects: SELECT code FROM country"),
            "SELECT code FROM country");
  EXPECT_EQ(extract_sql("  no sql here  "), "no sql here");
}

TEST(Candidate, LenientParse) {
  const Candidate ok = make_candidate("SELECT name FROM country", schema("world_1"), {}, "t");
  EXPECT_TRUE(ok.parsed());
  const Candidate bad = make_candidate("SELEC name FROM country", schema("world_1"), {}, "t");
  EXPECT_FALSE(bad.parsed());
  EXPECT_FALSE(bad.parse_error.empty());
}

std::vector<QueryMetadata> three_way_conditions() {
  return {
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kWhere}},
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kExcept}},
      {Correctness::kCorrect, 400,
       TagSet{OperatorTag::kProject, OperatorTag::kWhere, OperatorTag::kExcept}},
  };
}

const char* const kThreeWaySql[] = {
    "SELECT countrycode FROM countrylanguage WHERE language != 'English'",
    "SELECT countrycode FROM countrylanguage EXCEPT SELECT countrycode FROM countrylanguage WHERE "
    "language = 'English'",
    "SELECT countrycode FROM countrylanguage WHERE isofficial = 'T' EXCEPT SELECT countrycode FROM "
    "countrylanguage WHERE language = 'English'",
};

std::string three_way_fixture() {
  std::string text = "# query\tcondition\tsql\n";
  const auto conds = three_way_conditions();
  for (std::size_t i = 0; i < conds.size(); ++i) {
    text += "q0\t" + flatten_metadata(conds[i]) + "\t" + kThreeWaySql[i] + "\n";
  }
  return text;
}

TEST(FixtureGenerator, OneQueryPerCondition) {
  TempDir dir;
  write_text(dir.path() / "f.tsv", three_way_fixture());
  const FixtureGenerator gen(dir.path() / "f.tsv");
  const auto conds = three_way_conditions();
  for (std::size_t i = 0; i < conds.size(); ++i) {
    GenerationRequest r;
    r.query_id = "q0";
    r.schema = &schema("world_1");
    r.metadata = conds[i];
    const auto out = gen.generate(r);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].sql_text, kThreeWaySql[i]);
    EXPECT_EQ(out[0].condition, conds[i]);
    EXPECT_EQ(out[0].backend_id, "fixture");
  }
  GenerationRequest missing;
  missing.query_id = "other";
  missing.schema = &schema("world_1");
  EXPECT_TRUE(gen.generate(missing).empty());
  const FixtureGenerator strict(dir.path() / "f.tsv", true);
  EXPECT_THROW(strict.generate(missing), BackendError);
}

TEST(FixtureGenerator, DecodeWidthAndKeyNormalization) {
  TempDir dir;
  write_text(dir.path() / "f.tsv",
             "q\tcorrect | rating:200 | tags:where,project\tSELECT name FROM city\n"
             "q\tcorrect | rating:200 | tags:project,where\tSELECT district FROM city\n"
             "q\tcorrect | rating:200 | tags:project,where\tSELECT id FROM city\n");
  const FixtureGenerator gen(dir.path() / "f.tsv");
  GenerationRequest r;
  r.query_id = "q";
  r.schema = &schema("world_1");
  r.metadata = {Correctness::kCorrect, 200, TagSet{OperatorTag::kProject, OperatorTag::kWhere}};
  r.decode_width = 2;
  const auto out = gen.generate(r);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].sql_text, "SELECT name FROM city");
  EXPECT_EQ(out[1].sql_text, "SELECT district FROM city");
}

TEST(FixtureGenerator, MalformedFile) {
  TempDir dir;
  write_text(dir.path() / "f.tsv", "q\tonly two\n");
  EXPECT_THROW(FixtureGenerator(dir.path() / "f.tsv"), FormatError);
  EXPECT_THROW(FixtureGenerator(dir.path() / "missing.tsv"), IoError);
}

TEST(GenerateAll, DistinctCandidatesAndDedup) {
  TempDir dir;
  write_text(dir.path() / "f.tsv",
             three_way_fixture() + "q0\t" + flatten_metadata(three_way_conditions()[2]) +
                 "\tselect COUNTRYCODE from countrylanguage where language != 'English'\n");
  const FixtureGenerator gen(dir.path() / "f.tsv");
  const auto result = generate_all(kNonEnglishNl, schema("world_1"), three_way_conditions(), gen,
                                   {.query_id = "q0", .demos = {}, .decode_width = 5, .parallelism = 3});
  EXPECT_TRUE(result.errors.empty());
  ASSERT_EQ(result.candidates.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(result.candidates[i].sql_text, kThreeWaySql[i]);
}

class FailingGenerator final : public Generator {
 public:
  std::string id() const override { return "failing"; }
  std::vector<Candidate> generate(const GenerationRequest& request) const override {
    if (request.metadata.tags.contains(OperatorTag::kExcept)) throw BackendError("boom");
    return {make_candidate("SELECT name FROM city", *request.schema, request.metadata, id())};
  }
};

TEST(GenerateAll, FailuresAreReportedWithPartialResult) {
  const FailingGenerator gen;
  GenerateAllOptions opts;
  opts.query_id = "q0";
  const auto result = generate_all(kNonEnglishNl, schema("world_1"), three_way_conditions(), gen, opts);
  EXPECT_EQ(result.candidates.size(), 1u);
  ASSERT_EQ(result.errors.size(), 2u);
  EXPECT_NE(result.errors[0].find("boom"), std::string::npos);
}

}  // namespace
}  // namespace metasql
