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

#include "metasql/classifier.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "metasql/error.hpp"
#include "strings.hpp"

namespace metasql {

HardnessBucket bucket_for(int hardness) {
  int rounded = ((hardness + kHardnessStep / 2) / kHardnessStep) * kHardnessStep;
  return HardnessBucket{std::clamp(rounded, kBaseRating, kMaxHardnessBucket)};
}

const std::vector<MetadataLabel>& label_vocabulary() {
  static const std::vector<MetadataLabel> kVocabulary = [] {
    std::vector<MetadataLabel> v;
    for (auto t : kAllTags) v.emplace_back(t);
    for (int h = kBaseRating; h <= kMaxHardnessBucket; h += kHardnessStep) {
      v.emplace_back(HardnessBucket{h});
    }
    return v;
  }();
  return kVocabulary;
}

std::string label_name(const MetadataLabel& label) {
  if (const auto* t = std::get_if<OperatorTag>(&label)) return std::string(tag_name(*t));
  return std::to_string(std::get<HardnessBucket>(label).value);
}

std::optional<MetadataLabel> label_from_name(std::string_view name) {
  for (const auto& l : label_vocabulary()) {
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

// --- heuristic backend -----------------------------------------------------

namespace {

constexpr double kAbsent = -10.0;

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool has_any_word(const std::vector<std::string>& words, std::initializer_list<std::string_view> keys) {
  return std::any_of(words.begin(), words.end(), [&](const std::string& w) {
    return std::find(keys.begin(), keys.end(), w) != keys.end();
  });
}

bool has_any_phrase(const std::string& padded, std::initializer_list<std::string_view> phrases) {
  return std::any_of(phrases.begin(), phrases.end(), [&](std::string_view p) {
    return padded.find(" " + std::string(p) + " ") != std::string::npos;
  });
}

bool is_superlative(const std::string& w) {
  static constexpr std::string_view kNotSuperlative[] = {
      "interest", "forest", "test", "request", "west", "rest", "best", "guest", "latest",
      "contest",  "honest", "suggest", "nest", "chest", "protest", "modest", "harvest"};
  if (w.size() <= 4 || !w.ends_with("est")) return false;
  return std::find(std::begin(kNotSuperlative), std::end(kNotSuperlative), w) ==
         std::end(kNotSuperlative);
}

void raise(std::array<double, kTagCount>& scores, OperatorTag t, double s) {
  auto& slot = scores[static_cast<std::size_t>(t)];
  slot = std::max(slot, s);
}

}  // namespace

std::vector<MetadataPrediction> HeuristicClassifier::predict_labels(
    const LabelRequest& request) const {
  if (detail::trim(request.nl).empty()) throw BackendError("empty NL query");
  const auto words = words_of(request.nl);
  const std::string padded = " " + detail::join(words, " ") + " ";

  std::array<double, kTagCount> scores;
  scores.fill(kAbsent);
  raise(scores, OperatorTag::kProject, 0.0);

  if (has_any_word(words, {"not", "no", "never", "without", "except", "don't", "doesn't",
                           "didn't", "excluding"}) ||
      has_any_phrase(padded, {"other than"})) {
    raise(scores, OperatorTag::kExcept, 0.0);
    raise(scores, OperatorTag::kWhere, -2.0);
  }
  if (has_any_word(words, {"whose", "named", "called", "where", "before", "after", "between",
                           "above", "below", "over", "under"}) ||
      has_any_phrase(padded, {"more than", "less than", "greater than", "larger than",
                              "smaller than", "older than", "younger than", "at least",
                              "at most", "equal to", "fewer than"})) {
    raise(scores, OperatorTag::kWhere, 0.0);
  }
  if (std::any_of(words.begin(), words.end(), is_superlative) ||
      has_any_word(words, {"most", "least", "top", "best", "worst"})) {
    raise(scores, OperatorTag::kOrder, 0.0);
    raise(scores, OperatorTag::kLimit, 0.0);
  }
  if (has_any_word(words, {"sorted", "sort", "order", "ordered", "ascending", "descending",
                           "alphabetical", "alphabetically"})) {
    raise(scores, OperatorTag::kOrder, 0.0);
  }
  if (has_any_word(words, {"count", "average", "avg", "mean", "total", "sum", "maximum",
                           "minimum", "max", "min"}) ||
      has_any_phrase(padded, {"how many", "number of"})) {
    raise(scores, OperatorTag::kAgg, 0.0);
  }
  const bool grouped = has_any_word(words, {"each", "per", "every"});
  if (grouped) {
    raise(scores, OperatorTag::kGroup, 0.0);
    raise(scores, OperatorTag::kAgg, -1.0);
    if (has_any_phrase(padded, {"more than", "at least", "fewer than", "less than"})) {
      raise(scores, OperatorTag::kHaving, -1.0);
    }
  }
  if (has_any_word(words, {"distinct", "different", "unique"})) {
    raise(scores, OperatorTag::kDistinct, -0.5);
  }
  if (has_any_word(words, {"either"})) raise(scores, OperatorTag::kUnion, -0.5);
  if (has_any_word(words, {"or"})) raise(scores, OperatorTag::kUnion, -1.5);
  if (has_any_word(words, {"both"})) raise(scores, OperatorTag::kIntersect, -0.5);
  if (has_any_phrase(padded, {"and also"})) raise(scores, OperatorTag::kIntersect, -1.0);
  if (has_any_phrase(padded, {"than the average", "than average", "than any", "than all",
                              "above average", "below average"})) {
    raise(scores, OperatorTag::kSubquery, -0.5);
    raise(scores, OperatorTag::kAgg, -1.0);
  }
  if (request.schema) {
    std::size_t mentioned = 0;
    for (const auto& t : request.schema->tables()) {
      const std::string name = detail::to_lower(
          t.natural_name.empty() ? request.schema->table_natural_name(t.name) : t.natural_name);
      const std::string stem = name.size() > 3 ? name.substr(0, name.size() - 1) : name;
      if (padded.find(" " + stem) != std::string::npos) ++mentioned;
    }
    raise(scores, OperatorTag::kJoin, mentioned >= 2 ? -0.5 : -5.0);
  }

  int expected = kBaseRating;
  for (auto t : kAllTags) {
    if (scores[static_cast<std::size_t>(t)] >= -1.0) expected += component_score(t);
  }
  const int predicted_bucket = bucket_for(expected).value;

  std::vector<MetadataPrediction> out;
  for (const auto& label : label_vocabulary()) {
    double s;
    if (const auto* t = std::get_if<OperatorTag>(&label)) {
      s = scores[static_cast<std::size_t>(*t)];
    } else {
      const int v = std::get<HardnessBucket>(label).value;
      s = -static_cast<double>(std::abs(v - predicted_bucket)) / kHardnessStep;
    }
    out.push_back({label, s});
  }
  return out;
}

// --- file backend ----------------------------------------------------------

FileClassifier::FileClassifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendError("cannot open predictions file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw BackendError("predictions file is empty: " + path.string());
  const auto header = detail::split(line, "\t");
  const auto& vocab = label_vocabulary();
  if (header.size() != vocab.size() + 1 || header[0] != "query_id") {
    throw BackendError("predictions header must be query_id followed by " +
                       std::to_string(vocab.size()) + " labels");
  }
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (header[i + 1] != label_name(vocab[i])) {
      throw BackendError("predictions header column " + std::to_string(i + 2) + " is '" +
                         header[i + 1] + "', expected '" + label_name(vocab[i]) + "'");
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, "\t");
    if (fields.size() != header.size()) {
      throw BackendError("predictions line " + std::to_string(line_no) + " has " +
                         std::to_string(fields.size()) + " fields");
    }
    std::vector<double> scores;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        scores.push_back(std::stod(fields[i]));
      } catch (const std::exception&) {
        throw BackendError("predictions line " + std::to_string(line_no) + ": bad score '" +
                           fields[i] + "'");
      }
    }
    rows_[fields[0]] = std::move(scores);
  }
}

std::vector<MetadataPrediction> FileClassifier::predict_labels(const LabelRequest& request) const {
  if (detail::trim(request.nl).empty()) throw BackendError("empty NL query");
  auto it = rows_.find(request.query_id);
  if (it == rows_.end()) throw BackendError("no predictions for query " + request.query_id);
  std::vector<MetadataPrediction> out;
  const auto& vocab = label_vocabulary();
  for (std::size_t i = 0; i < vocab.size(); ++i) out.push_back({vocab[i], it->second[i]});
  return out;
}

// --- oracle backend --------------------------------------------------------

OracleClassifier::OracleClassifier(std::map<std::string, SqlQuery> gold_by_query_id)
    : gold_(std::move(gold_by_query_id)) {}

std::vector<MetadataPrediction> OracleClassifier::predict_labels(
    const LabelRequest& request) const {
  if (detail::trim(request.nl).empty()) throw BackendError("empty NL query");
  auto it = gold_.find(request.query_id);
  if (it == gold_.end()) throw BackendError("oracle has no gold SQL for query " + request.query_id);
  const TagSet tags = extract_operator_tags(it->second);
  const int bucket = bucket_for(compute_hardness(it->second)).value;
  std::vector<MetadataPrediction> out;
  for (const auto& label : label_vocabulary()) {
    bool present;
    if (const auto* t = std::get_if<OperatorTag>(&label)) {
      present = tags.contains(*t);
    } else {
      present = std::get<HardnessBucket>(label).value == bucket;
    }
    out.push_back({label, present ? 0.0 : kAbsentScore});
  }
  return out;
}

// --- selection and composition ---------------------------------------------

LabelSet select_labels(const std::vector<MetadataPrediction>& predictions, double threshold) {
  LabelSet out;
  for (const auto& p : predictions) {
    if (!(p.score >= threshold)) continue;
    if (const auto* t = std::get_if<OperatorTag>(&p.label)) {
      out.tags.insert(*t);
    } else {
      out.hardness.push_back(std::get<HardnessBucket>(p.label).value);
    }
  }
  std::sort(out.hardness.begin(), out.hardness.end());
  out.hardness.erase(std::unique(out.hardness.begin(), out.hardness.end()), out.hardness.end());
  return out;
}

CompositionStore CompositionStore::build(const std::vector<QueryMetadata>& corpus) {
  std::map<std::pair<int, std::uint16_t>, std::size_t> counts;
  std::map<std::uint16_t, TagSet> sets;
  for (const auto& m : corpus) {
    const int h = bucket_for(m.hardness).value;
    ++counts[{h, m.tags.mask()}];
    sets[m.tags.mask()] = m.tags;
  }
  CompositionStore store;
  for (const auto& [key, n] : counts) store.entries_.push_back({key.first, sets[key.second], n});
  return store;
}

std::size_t CompositionStore::count(int hardness, const TagSet& tags) const {
  for (const auto& e : entries_) {
    if (e.hardness == hardness && e.tags == tags) return e.count;
  }
  return 0;
}

std::string CompositionStore::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : entries_) {
    std::vector<std::string> names;
    for (auto t : e.tags.to_vector()) names.emplace_back(tag_name(t));
    j.push_back({{"hardness", e.hardness}, {"tags", names}, {"count", e.count}});
  }
  return j.dump(2);
}

CompositionStore CompositionStore::from_json(std::string_view text) {
  std::vector<QueryMetadata> expanded;
  CompositionStore store;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw FormatError("composition store must be a JSON array");
    std::size_t index = 0;
    for (const auto& item : j) {
      Entry e;
      e.hardness = item.at("hardness").get<int>();
      e.count = item.at("count").get<std::size_t>();
      for (const auto& name : item.at("tags")) {
        auto tag = tag_from_name(name.get<std::string>());
        if (!tag) {
          throw FormatError("composition store entry " + std::to_string(index) +
                            ": unknown tag " + name.get<std::string>());
        }
        e.tags.insert(*tag);
      }
      store.entries_.push_back(e);
      ++index;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed composition store: ") + e.what());
  }
  std::sort(store.entries_.begin(), store.entries_.end(), [](const Entry& a, const Entry& b) {
    return std::pair(a.hardness, a.tags.mask()) < std::pair(b.hardness, b.tags.mask());
  });
  return store;
}

void CompositionStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write composition store " + path.string());
  out << to_json() << '\n';
}

CompositionStore CompositionStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read composition store " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::vector<QueryMetadata> enumerate_compositions(const LabelSet& labels,
                                                  const CompositionStore& store,
                                                  std::size_t max_n) {
  std::vector<QueryMetadata> out;
  if (store.empty()) {
    TagSet tags = labels.tags;
    tags.insert(OperatorTag::kProject);
    std::vector<int> buckets = labels.hardness;
    if (buckets.empty()) {
      int h = kBaseRating;
      for (auto t : tags.to_vector()) h += component_score(t);
      buckets.push_back(bucket_for(h).value);
    }
    for (int h : buckets) {
      if (out.size() >= max_n) break;
      out.push_back({Correctness::kCorrect, h, tags});
    }
    return out;
  }

  std::vector<CompositionStore::Entry> matches;
  for (const auto& e : store.entries()) {
    const bool hardness_ok =
        std::find(labels.hardness.begin(), labels.hardness.end(), e.hardness) != labels.hardness.end();
    if (hardness_ok && e.tags.is_subset_of(labels.tags)) matches.push_back(e);
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const CompositionStore::Entry& a, const CompositionStore::Entry& b) {
                     if (a.count != b.count) return a.count > b.count;
                     if (a.tags.size() != b.tags.size()) return a.tags.size() < b.tags.size();
                     const auto va = a.tags.to_vector();
                     const auto vb = b.tags.to_vector();
                     if (va != vb) return va < vb;
                     return a.hardness < b.hardness;
                   });
  for (const auto& e : matches) {
    if (out.size() >= max_n) break;
    out.push_back({Correctness::kCorrect, e.hardness, e.tags});
  }
  return out;
}

}  // namespace metasql
