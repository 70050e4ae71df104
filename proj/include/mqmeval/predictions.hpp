// Copyright 2026 The mqmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Prediction files: one JSON object per line,
//   {"lp", "dataset", "doc_id", "seg_id", "system",
//    "errors": [{span, start, end, severity, category}], "score"}
// Errors may omit start/end (e.g. dumps from external metrics); such spans
// are aligned to the gold hypothesis greedily, left to right.

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mqmeval/canonical.hpp"
#include "mqmeval/char_f1.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/response.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

struct Prediction {
  std::string dataset;
  SourceKey key;
  SystemId system;
  std::vector<ErrorSpan> errors;
  std::optional<double> score;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

using ItemKey = std::pair<SourceKey, SystemId>;

inline ItemKey KeyOf(const Prediction& p) { return {p.key, p.system}; }
inline ItemKey KeyOf(const PromptBundle& b) {
  return {b.test.source_key, b.test.system};
}

inline ordered_json PredictionToJson(const Prediction& p) {
  ordered_json j;
  j["lp"] = p.key.lp;
  j["dataset"] = p.dataset;
  j["doc_id"] = p.key.doc_id;
  j["seg_id"] = p.key.seg_id;
  j["system"] = p.system.str();
  j["errors"] = ErrorsToJson(p.errors);
  j["score"] = p.score ? ordered_json(*p.score) : ordered_json(nullptr);
  return j;
}

// Gold ratings of the chosen round, addressable by dataset and
// (segment, system).
class GoldIndex {
 public:
  GoldIndex() = default;
  explicit GoldIndex(const std::vector<TestSuite>& suites,
                     const std::optional<RoundId>& round = std::nullopt) {
    for (const auto& suite : suites) Add(suite, round);
  }

  void Add(const TestSuite& suite, const std::optional<RoundId>& round) {
    const RoundId r = round.value_or(suite.PrimaryRound());
    auto& ratings = by_dataset_[suite.dataset];
    for (const auto& [system, cells] : suite.Round(r)) {
      for (const auto& cell : cells) {
        if (!cell.empty()) {
          ratings[{cell.front().source_key, system}] = cell.front();
        }
      }
    }
  }

  void Insert(const std::string& dataset, const RatedTranslation& rating) {
    by_dataset_[dataset][{rating.source_key, rating.system}] = rating;
  }

  // An empty dataset is accepted when the index holds exactly one.
  const RatedTranslation* Find(const ItemKey& key,
                               const std::string& dataset = {}) const {
    const auto* ratings = Ratings(dataset);
    if (ratings == nullptr) return nullptr;
    const auto it = ratings->find(key);
    return it == ratings->end() ? nullptr : &it->second;
  }

  const std::map<ItemKey, RatedTranslation>* Ratings(
      const std::string& dataset) const {
    if (dataset.empty()) {
      if (by_dataset_.size() != 1) return nullptr;
      return &by_dataset_.begin()->second;
    }
    const auto it = by_dataset_.find(dataset);
    return it == by_dataset_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> Datasets() const {
    std::vector<std::string> out;
    for (const auto& [d, r] : by_dataset_) out.push_back(d);
    return out;
  }

 private:
  std::map<std::string, std::map<ItemKey, RatedTranslation>> by_dataset_;
};

// Parses one prediction record; errors are checked against the gold
// hypothesis of the same (segment, system).
inline Prediction PredictionFromLine(const std::string& text, std::size_t line,
                                     const GoldIndex& gold) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(line, err.what());
  }
  if (!j.is_object()) throw ParseError(line, "record is not a JSON object");
  Prediction p;
  p.key.lp = internal::RequireString(j, "lp", line);
  p.dataset = j.contains("dataset") && j["dataset"].is_string()
                  ? j["dataset"].get<std::string>()
                  : std::string();
  p.key.doc_id = internal::RequireString(j, "doc_id", line);
  p.key.seg_id = internal::RequireInt(j, "seg_id", line);
  p.system = SystemId(internal::RequireString(j, "system", line));
  const RatedTranslation* ref = gold.Find(KeyOf(p), p.dataset);
  if (ref == nullptr) {
    throw AlignmentError("line " + std::to_string(line) +
                         ": no gold rating for " + p.key.str() + " / " +
                         p.system.str());
  }
  if (p.dataset.empty()) p.dataset = ref->dataset;
  if (j.contains("errors") && !j["errors"].is_null()) {
    if (!j["errors"].is_array()) throw ParseError(line, "errors must be an array");
    std::vector<CharRange> consumed;
    for (const auto& e : j["errors"]) {
      if (e.is_object() && e.contains("start") && e.contains("end")) {
        p.errors.push_back(ErrorSpanFromJson(e, ref->target, line));
        continue;
      }
      ErrorSpan span;
      span.span_text = internal::RequireString(e, "span", line);
      const auto sev = ParseSeverity(internal::RequireString(e, "severity", line));
      if (!sev || *sev == Severity::kNeutral) {
        throw ParseError(line, "bad severity in prediction");
      }
      span.severity = *sev;
      span.category = NormalizeCategory(
          e.contains("category") ? e["category"].get<std::string>() : "other");
      const auto range = AlignSpan(ref->target, span.span_text, consumed);
      if (!range) {
        throw SpanIntegrityError("line " + std::to_string(line) + ": span \"" +
                                 span.span_text + "\" not in hypothesis");
      }
      span.start = range->first;
      span.end = range->second;
      p.errors.push_back(std::move(span));
    }
    SortSpans(p.errors);
  }
  if (j.contains("score") && !j["score"].is_null()) {
    if (!j["score"].is_number()) throw ParseError(line, "score must be a number");
    p.score = j["score"].get<double>();
  }
  return p;
}

inline std::vector<Prediction> LoadPredictions(const std::string& path,
                                               const GoldIndex& gold) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (utf8::Trim(line).empty()) continue;
    out.push_back(PredictionFromLine(line, line_no, gold));
  }
  return out;
}

inline void WritePredictions(std::ostream& out,
                             const std::vector<Prediction>& predictions) {
  for (const auto& p : predictions) out << PredictionToJson(p).dump() << '\n';
}

inline void SavePredictions(const std::string& path,
                            const std::vector<Prediction>& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot write " + path);
  WritePredictions(out, predictions);
}

// Character-credit rows for every prediction against its gold rating.
inline std::vector<SegmentRow> ScorePredictions(
    const std::vector<Prediction>& predictions, const GoldIndex& gold) {
  std::vector<SegmentRow> rows;
  rows.reserve(predictions.size());
  for (const auto& p : predictions) {
    const RatedTranslation* ref = gold.Find(KeyOf(p), p.dataset);
    if (ref == nullptr) {
      throw AlignmentError("no gold rating for " + p.key.str() + " / " +
                           p.system.str());
    }
    rows.push_back(ScoreSegment(p.key, p.system, ref->target, ref->errors,
                                p.errors));
  }
  return rows;
}

}  // namespace mqmeval
