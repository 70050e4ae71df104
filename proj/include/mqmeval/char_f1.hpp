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

// Character-level span scoring. Every hypothesis character is labeled none,
// minor or major (critical counts as major). A predicted error character
// earns 1.0 when the gold severity matches and 0.5 when it does not.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mqmeval/errors.hpp"
#include "mqmeval/types.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

enum class CharLabel : std::uint8_t { kNone = 0, kMinor = 1, kMajor = 2 };

using CharLabeling = std::vector<CharLabel>;

inline CharLabel LabelFor(Severity s) {
  switch (s) {
    case Severity::kNeutral:
      return CharLabel::kNone;
    case Severity::kMinor:
      return CharLabel::kMinor;
    case Severity::kMajor:
    case Severity::kCritical:
      return CharLabel::kMajor;
  }
  return CharLabel::kNone;
}

inline CharLabeling CharLabels(std::string_view hypothesis,
                               const std::vector<ErrorSpan>& errors) {
  CharLabeling labels(utf8::Length(hypothesis), CharLabel::kNone);
  for (const ErrorSpan& e : errors) {
    if (e.end > labels.size() || e.start > e.end) {
      throw SpanIntegrityError("span [" + std::to_string(e.start) + ", " +
                               std::to_string(e.end) +
                               ") outside hypothesis of length " +
                               std::to_string(labels.size()));
    }
    const CharLabel l = LabelFor(e.severity);
    for (std::size_t i = e.start; i < e.end; ++i) {
      if (l > labels[i]) labels[i] = l;
    }
  }
  return labels;
}

struct Credit {
  double credit_sum = 0.0;
  std::int64_t pred_chars = 0;
  std::int64_t gold_chars = 0;
};

inline Credit SegmentCredit(const CharLabeling& gold, const CharLabeling& pred) {
  if (gold.size() != pred.size()) {
    throw LabelingError("gold has " + std::to_string(gold.size()) +
                        " characters, prediction " +
                        std::to_string(pred.size()));
  }
  Credit c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] != CharLabel::kNone;
    const bool p = pred[i] != CharLabel::kNone;
    c.gold_chars += g;
    c.pred_chars += p;
    if (g && p) c.credit_sum += gold[i] == pred[i] ? 1.0 : 0.5;
  }
  return c;
}

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Prf1 Prf1FromSums(double credit, double pred_chars, double gold_chars) {
  Prf1 out;
  out.precision = pred_chars > 0 ? credit / pred_chars : 0.0;
  out.recall = gold_chars > 0 ? credit / gold_chars : 0.0;
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

inline SegmentRow ScoreSegment(const SourceKey& key, const SystemId& system,
                               std::string_view hypothesis,
                               const std::vector<ErrorSpan>& gold,
                               const std::vector<ErrorSpan>& pred) {
  const Credit c =
      SegmentCredit(CharLabels(hypothesis, gold), CharLabels(hypothesis, pred));
  return SegmentRow{key, system, c.credit_sum, c.pred_chars, c.gold_chars};
}

// Micro aggregation over characters. Rows are expected to come from one
// language pair; see CrossLpPrf1 for several.
inline Prf1 CorpusPrf1(const std::vector<SegmentRow>& rows) {
  double credit = 0.0;
  double pred = 0.0;
  double gold = 0.0;
  for (const auto& r : rows) {
    credit += r.credit_sum;
    pred += static_cast<double>(r.pred_chars);
    gold += static_cast<double>(r.gold_chars);
  }
  return Prf1FromSums(credit, pred, gold);
}

// Mean of per-segment P/R/F1. Segments where both gold and prediction are
// empty carry no information and are skipped.
inline Prf1 MacroSegmentPrf1(const std::vector<SegmentRow>& rows) {
  Prf1 sum;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.pred_chars == 0 && r.gold_chars == 0) continue;
    const Prf1 s = Prf1FromSums(r.credit_sum, static_cast<double>(r.pred_chars),
                                static_cast<double>(r.gold_chars));
    sum.precision += s.precision;
    sum.recall += s.recall;
    sum.f1 += s.f1;
    ++n;
  }
  if (n == 0) return {};
  const double d = static_cast<double>(n);
  return Prf1{sum.precision / d, sum.recall / d, sum.f1 / d};
}

enum class Aggregation { kMicro, kMacro };

inline Aggregation ParseAggregation(std::string_view s) {
  if (s == "micro") return Aggregation::kMicro;
  if (s == "macro") return Aggregation::kMacro;
  throw UsageError("unknown aggregation \"" + std::string(s) + "\"");
}

inline std::map<std::string, std::vector<SegmentRow>> SplitByLp(
    const std::vector<SegmentRow>& rows) {
  std::map<std::string, std::vector<SegmentRow>> out;
  for (const auto& r : rows) out[r.key.lp].push_back(r);
  return out;
}

inline std::map<std::string, Prf1> PerLpPrf1(
    const std::vector<SegmentRow>& rows,
    Aggregation aggregation = Aggregation::kMicro) {
  std::map<std::string, Prf1> out;
  for (const auto& [lp, lp_rows] : SplitByLp(rows)) {
    out[lp] = aggregation == Aggregation::kMicro ? CorpusPrf1(lp_rows)
                                                 : MacroSegmentPrf1(lp_rows);
  }
  return out;
}

// Unweighted mean of per-language-pair scores.
inline Prf1 CrossLpPrf1(const std::vector<SegmentRow>& rows,
                        Aggregation aggregation = Aggregation::kMicro) {
  const auto per_lp = PerLpPrf1(rows, aggregation);
  Prf1 out;
  if (per_lp.empty()) return out;
  for (const auto& [lp, s] : per_lp) {
    out.precision += s.precision;
    out.recall += s.recall;
    out.f1 += s.f1;
  }
  const double n = static_cast<double>(per_lp.size());
  return Prf1{out.precision / n, out.recall / n, out.f1 / n};
}

inline std::map<SystemId, Prf1> PerSystemBreakdown(
    const std::vector<SegmentRow>& rows,
    Aggregation aggregation = Aggregation::kMicro) {
  std::map<SystemId, std::vector<SegmentRow>> by_system;
  for (const auto& r : rows) by_system[r.system].push_back(r);
  std::map<SystemId, Prf1> out;
  for (const auto& [system, sys_rows] : by_system) {
    out[system] = CrossLpPrf1(sys_rows, aggregation);
  }
  return out;
}

}  // namespace mqmeval
