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

// Core domain types: error spans, rated translations, test suites, prompt
// bundles and evaluation reports. All are plain values.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mqmeval/errors.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

// String identifier tagged by what it names, so a rater id cannot be passed
// where a system id is expected.
template <typename Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;

 private:
  std::string value_;
};

using SystemId = Id<struct SystemTag>;
using RaterId = Id<struct RaterTag>;
using RoundId = Id<struct RoundTag>;

enum class Severity { kNeutral, kMinor, kMajor, kCritical };

inline std::string_view SeverityName(Severity s) {
  switch (s) {
    case Severity::kNeutral:
      return "neutral";
    case Severity::kMinor:
      return "minor";
    case Severity::kMajor:
      return "major";
    case Severity::kCritical:
      return "critical";
  }
  return "neutral";
}

// Accepts any casing and surrounding whitespace. "no-error" is an alias for
// neutral, as used by WMT releases.
inline std::optional<Severity> ParseSeverity(std::string_view raw) {
  const std::string s = utf8::CaseFold(utf8::Trim(raw));
  if (s == "minor") return Severity::kMinor;
  if (s == "major") return Severity::kMajor;
  if (s == "critical") return Severity::kCritical;
  if (s == "neutral" || s == "no-error") return Severity::kNeutral;
  return std::nullopt;
}

// Rank used when overlapping spans are resolved: critical > major > minor.
inline int SeverityRank(Severity s) { return static_cast<int>(s); }

struct CategoryPath {
  std::string main;
  std::optional<std::string> sub;

  std::string str() const { return sub ? main + "/" + *sub : main; }
  bool is_no_error() const { return main == "no-error"; }

  friend bool operator==(const CategoryPath&, const CategoryPath&) = default;
  friend auto operator<=>(const CategoryPath&, const CategoryPath&) = default;
};

struct ErrorSpan {
  std::string span_text;
  std::size_t start = 0;  // scalar values, inclusive
  std::size_t end = 0;    // scalar values, exclusive
  Severity severity = Severity::kMinor;
  CategoryPath category;

  friend bool operator==(const ErrorSpan&, const ErrorSpan&) = default;
};

// Checks 0 <= start < end <= len(target), target[start:end] == span_text and
// that the severity is not neutral.
inline void ValidateSpan(std::string_view target, const ErrorSpan& e) {
  const std::size_t len = utf8::Length(target);
  if (e.start >= e.end || e.end > len) {
    throw SpanIntegrityError("offsets [" + std::to_string(e.start) + ", " +
                             std::to_string(e.end) +
                             ") invalid for target of length " +
                             std::to_string(len));
  }
  if (e.severity == Severity::kNeutral) {
    throw SpanIntegrityError("error span \"" + e.span_text +
                             "\" has neutral severity");
  }
  const std::string slice = utf8::Slice(target, e.start, e.end);
  if (slice != e.span_text) {
    throw SpanIntegrityError("span \"" + e.span_text +
                             "\" does not match target slice \"" + slice +
                             "\"");
  }
}

inline void SortSpans(std::vector<ErrorSpan>& errors) {
  std::stable_sort(errors.begin(), errors.end(),
                   [](const ErrorSpan& a, const ErrorSpan& b) {
                     return std::tie(a.start, a.end) <
                            std::tie(b.start, b.end);
                   });
}

struct SourceKey {
  std::string lp;
  std::string doc_id;
  std::int64_t seg_id = 0;

  std::string str() const {
    return lp + ":" + doc_id + ":" + std::to_string(seg_id);
  }
  friend auto operator<=>(const SourceKey&, const SourceKey&) = default;
  friend bool operator==(const SourceKey&, const SourceKey&) = default;
};

struct SourceSegment {
  SourceKey key;
  std::string text;
};

struct RatedTranslation {
  std::string dataset;
  RoundId round;
  SystemId system;
  RaterId rater;
  SourceKey source_key;
  std::string source;
  std::string target;
  std::vector<ErrorSpan> errors;  // sorted by (start, end)
  std::optional<double> score;    // direct assessment, [0, 100]

  friend bool operator==(const RatedTranslation&,
                         const RatedTranslation&) = default;
};

inline void ValidateRating(const RatedTranslation& r) {
  for (const ErrorSpan& e : r.errors) ValidateSpan(r.target, e);
  for (std::size_t i = 1; i < r.errors.size(); ++i) {
    const auto& a = r.errors[i - 1];
    const auto& b = r.errors[i];
    if (std::tie(a.start, a.end) > std::tie(b.start, b.end)) {
      throw SpanIntegrityError("errors not sorted by (start, end) for " +
                               r.source_key.str());
    }
  }
  if (r.score && (*r.score < 0.0 || *r.score > 100.0)) {
    throw RangeError("score " + std::to_string(*r.score) +
                     " outside [0, 100]");
  }
}

// One rating cell; more than one entry only for merged rounds. Empty means
// the (system, segment) pair was not rated.
using RatingCell = std::vector<RatedTranslation>;

struct TestSuite {
  std::string dataset;
  std::string lp;
  std::vector<SourceSegment> segments;
  std::map<RoundId, std::map<SystemId, std::vector<RatingCell>>> rounds;

  std::optional<std::size_t> SegmentIndex(const SourceKey& key) const {
    const auto it = std::lower_bound(
        segments.begin(), segments.end(), key,
        [](const SourceSegment& s, const SourceKey& k) { return s.key < k; });
    if (it == segments.end() || it->key != key) return std::nullopt;
    return static_cast<std::size_t>(it - segments.begin());
  }

  bool HasRound(const RoundId& round) const { return rounds.contains(round); }

  const std::map<SystemId, std::vector<RatingCell>>& Round(
      const RoundId& round) const {
    const auto it = rounds.find(round);
    if (it == rounds.end()) {
      throw RoundError("round \"" + round.str() + "\" not in suite " + lp);
    }
    return it->second;
  }

  std::vector<SystemId> Systems(const RoundId& round) const {
    std::vector<SystemId> out;
    for (const auto& [system, cells] : Round(round)) out.push_back(system);
    return out;
  }

  // First rating of the cell, or nullptr for a hole.
  const RatedTranslation* Rating(const RoundId& round, const SystemId& system,
                                 std::size_t segment) const {
    const auto& systems = Round(round);
    const auto it = systems.find(system);
    if (it == systems.end() || it->second[segment].empty()) return nullptr;
    return &it->second[segment].front();
  }

  // Lexicographically smallest round; the default gold/ICL round.
  RoundId PrimaryRound() const {
    if (rounds.empty()) throw EmptySuiteError("suite has no rounds");
    return rounds.begin()->first;
  }
};

enum class Strategy { kSpecialist, kShuffled, kFixedDifferentSource, kAugmented };

inline std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kSpecialist:
      return "specialist";
    case Strategy::kShuffled:
      return "shuffled";
    case Strategy::kFixedDifferentSource:
      return "fixed-diff";
    case Strategy::kAugmented:
      return "augmented";
  }
  return "specialist";
}

inline Strategy ParseStrategy(std::string_view s) {
  if (s == "specialist") return Strategy::kSpecialist;
  if (s == "shuffled") return Strategy::kShuffled;
  if (s == "fixed-diff" || s == "fixed_different_source") {
    return Strategy::kFixedDifferentSource;
  }
  if (s == "augmented") return Strategy::kAugmented;
  throw UsageError("unknown strategy \"" + std::string(s) + "\"");
}

// One test translation with its ordered demonstrations. The test's errors
// are gold annotations kept for meta-evaluation; renderers never show them.
struct PromptBundle {
  RatedTranslation test;
  std::vector<RatedTranslation> icl;
  Strategy strategy = Strategy::kSpecialist;
  std::optional<std::uint64_t> seed;
  bool filter_applied = false;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

struct SegmentRow {
  SourceKey key;
  SystemId system;
  double credit_sum = 0.0;
  std::int64_t pred_chars = 0;
  std::int64_t gold_chars = 0;
};

struct EvalReport {
  std::vector<SegmentRow> per_segment;
  std::map<std::string, double> aggregates;
  std::map<std::string, std::string> metadata;
};

}  // namespace mqmeval
