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
#include <random>
#include <set>

#include "metasql/classifier.hpp"
#include "metasql/error.hpp"
#include "support.hpp"

namespace metasql {
namespace {

using testing::parse;
using testing::schema;
using testing::TempDir;
using testing::write_text;

constexpr const char* kNonEnglishNl = "What are the country codes for countries that do not speak English?";

std::vector<MetadataPrediction> uniform_predictions(double score) {
  std::vector<MetadataPrediction> out;
  for (const auto& l : label_vocabulary()) out.push_back({l, score});
  return out;
}

double score_of(const std::vector<MetadataPrediction>& preds, const std::string& name) {
  for (const auto& p : preds) {
    if (label_name(p.label) == name) return p.score;
  }
  ADD_FAILURE() << "missing label " << name;
  return 0.0;
}

TEST(Buckets, RoundAndClamp) {
  EXPECT_EQ(bucket_for(400).value, 400);
  EXPECT_EQ(bucket_for(424).value, 400);
  EXPECT_EQ(bucket_for(425).value, 450);
  EXPECT_EQ(bucket_for(20).value, 100);
  EXPECT_EQ(bucket_for(5000).value, 900);
}

TEST(Vocabulary, ThirteenTagsAndSeventeenBuckets) {
  const auto& v = label_vocabulary();
  ASSERT_EQ(v.size(), 30u);
  EXPECT_EQ(label_name(v.front()), "project");
  EXPECT_EQ(label_name(v[kTagCount]), "100");
  EXPECT_EQ(label_name(v.back()), "900");
  for (const auto& l : v) EXPECT_EQ(label_from_name(label_name(l)), l);
  EXPECT_FALSE(label_from_name("125").has_value());
  EXPECT_FALSE(label_from_name("select").has_value());
}

TEST(SelectLabels, ThresholdIsInclusive) {
  std::vector<MetadataPrediction> preds = uniform_predictions(-5.0);
  preds[static_cast<std::size_t>(OperatorTag::kExcept)].score = 0.0;
  preds[kTagCount + 6].score = -0.5;  // bucket 400
  const LabelSet s = select_labels(preds, -0.5);
  EXPECT_EQ(s.tags, (TagSet{OperatorTag::kExcept}));
  EXPECT_EQ(s.hardness, std::vector<int>{400});
  EXPECT_TRUE(select_labels(preds, 0.5).empty());
}

TEST(SelectLabels, MonotoneInThreshold) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> score(-59.0, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MetadataPrediction> preds;
    for (const auto& l : label_vocabulary()) preds.push_back({l, score(rng)});
    std::size_t previous = label_vocabulary().size() + 1;
    LabelSet previous_set = select_labels(preds, -60.0);
    EXPECT_EQ(previous_set.size(), label_vocabulary().size());
    for (double p = -60.0; p <= 1.0; p += 0.5) {
      const LabelSet s = select_labels(preds, p);
      EXPECT_LE(s.size(), previous);
      EXPECT_TRUE(s.tags.is_subset_of(previous_set.tags));
      for (int h : s.hardness) {
        EXPECT_NE(std::find(previous_set.hardness.begin(), previous_set.hardness.end(), h),
                  previous_set.hardness.end());
      }
      previous = s.size();
      previous_set = s;
    }
  }
}

CompositionStore three_way_store() {
  return CompositionStore::build({
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kWhere}},
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kExcept}},
      {Correctness::kCorrect, 400,
       TagSet{OperatorTag::kProject, OperatorTag::kWhere, OperatorTag::kExcept}},
  });
}

TEST(Compositions, ThreeWayConditions) {
  const LabelSet labels{TagSet{OperatorTag::kProject, OperatorTag::kWhere, OperatorTag::kExcept},
                        {400}};
  const auto out = enumerate_compositions(labels, three_way_store());
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(flatten_metadata(out[0]), "correct | rating:400 | tags:project,where");
  EXPECT_EQ(flatten_metadata(out[1]), "correct | rating:400 | tags:project,except");
  EXPECT_EQ(flatten_metadata(out[2]), "correct | rating:400 | tags:project,where,except");
}

TEST(Compositions, FrequencyDominatesAndUnselectedAreDropped) {
  const auto store = CompositionStore::build({
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kExcept}},
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kExcept}},
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kWhere}},
      {Correctness::kCorrect, 200, TagSet{OperatorTag::kProject, OperatorTag::kWhere}},
      {Correctness::kCorrect, 400, TagSet{OperatorTag::kProject, OperatorTag::kUnion}},
  });
  EXPECT_EQ(store.count(400, TagSet{OperatorTag::kProject, OperatorTag::kExcept}), 2u);
  const LabelSet labels{TagSet{OperatorTag::kProject, OperatorTag::kWhere, OperatorTag::kExcept},
                        {400}};
  const auto out = enumerate_compositions(labels, store);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].tags, (TagSet{OperatorTag::kProject, OperatorTag::kExcept}));
  EXPECT_EQ(out[1].tags, (TagSet{OperatorTag::kProject, OperatorTag::kWhere}));
  EXPECT_EQ(enumerate_compositions(labels, store, 1).size(), 1u);
}

TEST(Compositions, EmptyStoreFallsBack) {
  const LabelSet labels{TagSet{OperatorTag::kWhere}, {200, 300}};
  const auto out = enumerate_compositions(labels, CompositionStore{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(flatten_metadata(out[0]), "correct | rating:200 | tags:project,where");
  EXPECT_EQ(flatten_metadata(out[1]), "correct | rating:300 | tags:project,where");

  const auto derived = enumerate_compositions({TagSet{OperatorTag::kExcept}, {}}, CompositionStore{});
  ASSERT_EQ(derived.size(), 1u);
  EXPECT_EQ(derived[0].hardness, 400);
}

TEST(CompositionStore, JsonAndFileRoundTrip) {
  const auto store = three_way_store();
  EXPECT_EQ(CompositionStore::from_json(store.to_json()), store);
  TempDir dir;
  store.save(dir.path() / "store.json");
  EXPECT_EQ(CompositionStore::load(dir.path() / "store.json"), store);
  EXPECT_THROW(CompositionStore::from_json("{not json"), FormatError);
}

TEST(OracleClassifier, ScoresFollowGold) {
  const OracleClassifier c({{"q0", parse("SELECT countrycode FROM countrylanguage EXCEPT SELECT "
                                         "countrycode FROM countrylanguage WHERE language = 'English'",
                                         "world_1")}});
  const auto preds = c.predict_labels({"q0", kNonEnglishNl, &schema("world_1")});
  ASSERT_EQ(preds.size(), label_vocabulary().size());
  const LabelSet s = select_labels(preds, kDefaultThreshold);
  EXPECT_EQ(s.tags, (TagSet{OperatorTag::kProject, OperatorTag::kExcept}));
  EXPECT_EQ(s.hardness, std::vector<int>{400});
  EXPECT_THROW(c.predict_labels({"missing", kNonEnglishNl, &schema("world_1")}), BackendError);
}

TEST(HeuristicClassifier, NegationQuestion) {
  const HeuristicClassifier c;
  const auto preds = c.predict_labels({"q", kNonEnglishNl, &schema("world_1")});
  ASSERT_EQ(preds.size(), label_vocabulary().size());
  EXPECT_GE(score_of(preds, "project"), 0.0);
  EXPECT_GE(score_of(preds, "except"), 0.0);
  EXPECT_LT(score_of(preds, "union"), 0.0);
  EXPECT_LT(score_of(preds, "group"), score_of(preds, "except"));
}

TEST(HeuristicClassifier, SuperlativeAndGrouping) {
  const HeuristicClassifier c;
  const auto sup = c.predict_labels(
      {"q", "What is the name of the country with the largest population?", &schema("world_1")});
  EXPECT_GE(score_of(sup, "order"), 0.0);
  EXPECT_GE(score_of(sup, "limit"), 0.0);
  const auto grp =
      c.predict_labels({"q", "For each continent, how many countries are there?", &schema("world_1")});
  EXPECT_GE(score_of(grp, "group"), 0.0);
  EXPECT_GE(score_of(grp, "agg"), score_of(grp, "except"));
  EXPECT_THROW(c.predict_labels({"q", "", &schema("world_1")}), BackendError);
}

TEST(FileClassifier, ReadsRowsAndRejectsBadHeaders) {
  TempDir dir;
  std::string header = "query_id";
  std::string row = "dev_0";
  for (const auto& l : label_vocabulary()) {
    header += "\t" + label_name(l);
    row += label_name(l) == "except" ? "\t0" : "\t-3";
  }
  write_text(dir.path() / "p.tsv", header + "\n" + row + "\n");
  const FileClassifier c(dir.path() / "p.tsv");
  const auto preds = c.predict_labels({"dev_0", kNonEnglishNl, &schema("world_1")});
  EXPECT_EQ(select_labels(preds, -1.0).tags, (TagSet{OperatorTag::kExcept}));
  EXPECT_THROW(c.predict_labels({"dev_9", kNonEnglishNl, &schema("world_1")}), BackendError);

  write_text(dir.path() / "bad.tsv", "query_id\tproject\n");
  EXPECT_THROW(FileClassifier(dir.path() / "bad.tsv"), BackendError);
}

}  // namespace
}  // namespace metasql
