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

// Canonical rating file: UTF-8, one JSON object per line, one
// RatedTranslation per record with fields in the fixed order
//   lp, dataset, round, system, rater, doc_id, seg_id, source, target,
//   errors[{span, start, end, severity, category}], score
// so that re-serialized files diff cleanly.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "mqmeval/category.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/types.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

using ordered_json = nlohmann::ordered_json;

inline ordered_json ErrorSpanToJson(const ErrorSpan& e) {
  ordered_json j;
  j["span"] = e.span_text;
  j["start"] = e.start;
  j["end"] = e.end;
  j["severity"] = std::string(SeverityName(e.severity));
  j["category"] = e.category.str();
  return j;
}

inline ordered_json ErrorsToJson(const std::vector<ErrorSpan>& errors) {
  ordered_json arr = ordered_json::array();
  for (const ErrorSpan& e : errors) arr.push_back(ErrorSpanToJson(e));
  return arr;
}

inline ordered_json RatingToJson(const RatedTranslation& r) {
  ordered_json j;
  j["lp"] = r.source_key.lp;
  j["dataset"] = r.dataset;
  j["round"] = r.round.str();
  j["system"] = r.system.str();
  j["rater"] = r.rater.str();
  j["doc_id"] = r.source_key.doc_id;
  j["seg_id"] = r.source_key.seg_id;
  j["source"] = r.source;
  j["target"] = r.target;
  j["errors"] = ErrorsToJson(r.errors);
  j["score"] = r.score ? ordered_json(*r.score) : ordered_json(nullptr);
  return j;
}

inline std::string RatingToLine(const RatedTranslation& r) {
  return RatingToJson(r).dump(-1, ' ', false,
                              nlohmann::json::error_handler_t::strict);
}

namespace internal {

template <typename Json>
const Json& RequireField(const Json& j, const char* name, std::size_t line) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw ParseError(line, std::string("missing field \"") + name + "\"");
  }
  return *it;
}

template <typename Json>
std::string RequireString(const Json& j, const char* name, std::size_t line) {
  const Json& v = RequireField(j, name, line);
  if (!v.is_string()) {
    throw ParseError(line, std::string("field \"") + name +
                               "\" must be a string");
  }
  std::string s = v.template get<std::string>();
  if (!utf8::IsValid(s)) {
    throw ParseError(line, std::string("field \"") + name +
                               "\" is not valid UTF-8");
  }
  return s;
}

template <typename Json>
std::int64_t RequireInt(const Json& j, const char* name, std::size_t line) {
  const Json& v = RequireField(j, name, line);
  if (!v.is_number_integer()) {
    throw ParseError(line, std::string("field \"") + name +
                               "\" must be an integer");
  }
  return v.template get<std::int64_t>();
}

}  // namespace internal

// Parses one error object {span, start, end, severity, category} and checks
// it against `target`.
template <typename Json>
ErrorSpan ErrorSpanFromJson(const Json& j, std::string_view target,
                            std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "error entry is not an object");
  ErrorSpan e;
  e.span_text = internal::RequireString(j, "span", line);
  const std::int64_t start = internal::RequireInt(j, "start", line);
  const std::int64_t end = internal::RequireInt(j, "end", line);
  if (start < 0 || end < 0) {
    throw SpanIntegrityError("negative offset at line " +
                             std::to_string(line));
  }
  e.start = static_cast<std::size_t>(start);
  e.end = static_cast<std::size_t>(end);
  const std::string severity = internal::RequireString(j, "severity", line);
  const auto parsed = ParseSeverity(severity);
  if (!parsed) {
    throw ParseError(line, "unknown severity \"" + severity + "\"");
  }
  e.severity = *parsed;
  try {
    e.category = NormalizeCategory(internal::RequireString(j, "category", line));
  } catch (const InvalidCategory& err) {
    throw ParseError(line, err.what());
  }
  ValidateSpan(target, e);
  return e;
}

// Parses one canonical record. Throws ParseError for malformed JSON or
// fields, SpanIntegrityError for offset mismatches.
inline RatedTranslation RatingFromLine(std::string_view text,
                                       std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(line, err.what());
  }
  if (!j.is_object()) throw ParseError(line, "record is not a JSON object");
  RatedTranslation r;
  r.source_key.lp = internal::RequireString(j, "lp", line);
  r.dataset = internal::RequireString(j, "dataset", line);
  r.round = RoundId(internal::RequireString(j, "round", line));
  r.system = SystemId(internal::RequireString(j, "system", line));
  r.rater = RaterId(internal::RequireString(j, "rater", line));
  r.source_key.doc_id = internal::RequireString(j, "doc_id", line);
  r.source_key.seg_id = internal::RequireInt(j, "seg_id", line);
  r.source = internal::RequireString(j, "source", line);
  r.target = internal::RequireString(j, "target", line);
  const auto& errors = internal::RequireField(j, "errors", line);
  if (!errors.is_array()) throw ParseError(line, "errors must be an array");
  for (const auto& e : errors) {
    r.errors.push_back(ErrorSpanFromJson(e, r.target, line));
  }
  SortSpans(r.errors);
  const auto& score = internal::RequireField(j, "score", line);
  if (!score.is_null()) {
    if (!score.is_number()) throw ParseError(line, "score must be a number");
    r.score = score.get<double>();
  }
  ValidateRating(r);
  return r;
}

// Groups validated records into one TestSuite per (dataset, lp). Segments
// are ordered by key; every (round, system) gets a cell per segment, empty
// cells being holes.
inline std::vector<TestSuite> AssembleSuites(
    std::vector<RatedTranslation> records) {
  if (records.empty()) throw EmptySuiteError("no ratings");
  std::map<std::pair<std::string, std::string>, std::vector<RatedTranslation>>
      by_suite;
  for (auto& r : records) {
    by_suite[{r.dataset, r.source_key.lp}].push_back(std::move(r));
  }
  std::vector<TestSuite> suites;
  for (auto& [id, recs] : by_suite) {
    TestSuite suite;
    suite.dataset = id.first;
    suite.lp = id.second;
    std::map<SourceKey, std::string> sources;
    for (const auto& r : recs) {
      const auto [it, inserted] = sources.emplace(r.source_key, r.source);
      if (!inserted && it->second != r.source) {
        throw ConsistencyError("source text differs across records for " +
                               r.source_key.str());
      }
    }
    for (auto& [key, text] : sources) {
      suite.segments.push_back(SourceSegment{key, text});
    }
    std::set<std::tuple<RoundId, SystemId, SourceKey>> seen;
    for (auto& r : recs) {
      if (!seen.emplace(r.round, r.system, r.source_key).second) {
        throw ConsistencyError("duplicate rating for round " + r.round.str() +
                               ", system " + r.system.str() + ", segment " +
                               r.source_key.str());
      }
      auto& cells = suite.rounds[r.round][r.system];
      cells.resize(suite.segments.size());
      const std::size_t idx = *suite.SegmentIndex(r.source_key);
      cells[idx].push_back(std::move(r));
    }
    suites.push_back(std::move(suite));
  }
  return suites;
}

inline std::vector<RatedTranslation> ReadRatings(std::istream& in) {
  std::vector<RatedTranslation> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::Trim(line).empty()) continue;
    records.push_back(RatingFromLine(line, line_no));
  }
  return records;
}

inline std::vector<TestSuite> LoadCanonicalSuites(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return AssembleSuites(ReadRatings(in));
}

// Loads a file holding exactly one (dataset, language pair) suite.
inline TestSuite LoadCanonical(const std::string& path) {
  auto suites = LoadCanonicalSuites(path);
  if (suites.size() != 1) {
    throw ConsistencyError(path + " holds " + std::to_string(suites.size()) +
                           " suites; expected one (dataset, lp)");
  }
  return std::move(suites.front());
}

// All ratings of a suite in canonical order: round, segment, system.
inline std::vector<RatedTranslation> FlattenSuite(const TestSuite& suite) {
  std::vector<RatedTranslation> out;
  for (const auto& [round, systems] : suite.rounds) {
    for (std::size_t i = 0; i < suite.segments.size(); ++i) {
      for (const auto& [system, cells] : systems) {
        for (const auto& r : cells[i]) out.push_back(r);
      }
    }
  }
  return out;
}

inline void WriteRatings(std::ostream& out,
                         const std::vector<RatedTranslation>& ratings) {
  for (const auto& r : ratings) out << RatingToLine(r) << '\n';
}

inline void SaveCanonical(const std::string& path,
                          const std::vector<RatedTranslation>& ratings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot write " + path);
  WriteRatings(out, ratings);
}

}  // namespace mqmeval
