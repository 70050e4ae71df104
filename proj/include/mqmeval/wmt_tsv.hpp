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

// Converter from WMT-style MQM TSV exports to the canonical format.
//
// Expected columns: system, doc, seg_id, rater, source, target, category,
// severity. One error per row; the target marks it with <v>...</v>. Rows of
// the same (system, segment) are merged into one rating.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mqmeval/canonical.hpp"
#include "mqmeval/category.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/types.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

struct WmtTsvOptions {
  std::string lp;
  std::string dataset;
  std::string round = "round1";
};

struct WmtConversionStats {
  std::size_t rows = 0;
  std::size_t records = 0;
  std::size_t errors = 0;
  // Error rows with no span in the target (e.g. omissions marked in the
  // source); they cannot be scored character-wise.
  std::size_t dropped_spanless = 0;
};

struct TaggedText {
  std::string text;  // tags removed
  std::optional<std::pair<std::size_t, std::size_t>> span;  // scalar offsets
};

// Strips <v>/</v> from `tagged`. At most one tagged span is allowed.
inline TaggedText StripErrorTags(std::string_view tagged) {
  static constexpr std::string_view kOpen = "<v>";
  static constexpr std::string_view kClose = "</v>";
  TaggedText out;
  std::optional<std::size_t> open_at;
  std::size_t pairs = 0;
  std::size_t i = 0;
  while (i < tagged.size()) {
    if (tagged.substr(i, kOpen.size()) == kOpen) {
      if (open_at) throw TagError("nested <v> in \"" + std::string(tagged) + "\"");
      if (pairs > 0) {
        throw TagError("more than one <v> span in one row: \"" +
                       std::string(tagged) + "\"");
      }
      open_at = utf8::Length(out.text);
      i += kOpen.size();
    } else if (tagged.substr(i, kClose.size()) == kClose) {
      if (!open_at) {
        throw TagError("</v> without <v> in \"" + std::string(tagged) + "\"");
      }
      out.span = std::make_pair(*open_at, utf8::Length(out.text));
      open_at.reset();
      ++pairs;
      i += kClose.size();
    } else {
      out.text.push_back(tagged[i]);
      ++i;
    }
  }
  if (open_at) {
    throw TagError("unclosed <v> in \"" + std::string(tagged) + "\"");
  }
  return out;
}

namespace internal {

inline std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace internal

// Converts TSV rows to canonical ratings sorted by (segment, system).
inline std::vector<RatedTranslation> ConvertWmtTsv(
    std::istream& in, const WmtTsvOptions& options,
    WmtConversionStats* stats = nullptr) {
  if (options.lp.empty()) throw UsageError("WMT conversion needs --lp");
  WmtConversionStats local;
  std::map<std::tuple<SourceKey, std::string>, RatedTranslation> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = internal::SplitTabs(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "system") continue;
    if (fields.size() != 8) {
      throw ParseError(line_no, "expected 8 tab-separated columns, got " +
                                    std::to_string(fields.size()));
    }
    if (!utf8::IsValid(line)) throw ParseError(line_no, "invalid UTF-8");
    ++local.rows;
    const std::string& system = fields[0];
    SourceKey key;
    key.lp = options.lp;
    key.doc_id = fields[1];
    try {
      std::size_t used = 0;
      key.seg_id = std::stoll(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument(fields[2]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "seg_id \"" + fields[2] + "\" not an integer");
    }
    const TaggedText source = StripErrorTags(fields[4]);
    const TaggedText target = StripErrorTags(fields[5]);

    auto [it, inserted] = records.try_emplace(std::make_tuple(key, system));
    RatedTranslation& r = it->second;
    if (inserted) {
      r.dataset = options.dataset;
      r.round = RoundId(options.round);
      r.system = SystemId(system);
      r.rater = RaterId(fields[3]);
      r.source_key = key;
      r.source = source.text;
      r.target = target.text;
    } else {
      if (r.target != target.text || r.source != source.text) {
        throw ConsistencyError("line " + std::to_string(line_no) +
                               ": text differs from earlier rows of system " +
                               system + ", segment " + key.str());
      }
      if (r.rater.str() != fields[3]) {
        throw ConsistencyError("line " + std::to_string(line_no) +
                               ": rater differs from earlier rows of system " +
                               system + ", segment " + key.str());
      }
    }

    const auto severity = ParseSeverity(fields[7]);
    if (!severity) {
      throw ParseError(line_no, "unknown severity \"" + fields[7] + "\"");
    }
    CategoryPath category;
    try {
      category = NormalizeCategory(fields[6]);
    } catch (const InvalidCategory& err) {
      throw ParseError(line_no, err.what());
    }
    if (category.is_no_error() || *severity == Severity::kNeutral) continue;
    if (!target.span || target.span->first == target.span->second) {
      ++local.dropped_spanless;
      continue;
    }
    ErrorSpan e;
    e.start = target.span->first;
    e.end = target.span->second;
    e.span_text = utf8::Slice(target.text, e.start, e.end);
    e.severity = *severity;
    e.category = std::move(category);
    r.errors.push_back(std::move(e));
    ++local.errors;
  }
  std::vector<RatedTranslation> out;
  out.reserve(records.size());
  for (auto& [key, r] : records) {
    SortSpans(r.errors);
    ValidateRating(r);
    out.push_back(std::move(r));
  }
  local.records = out.size();
  if (stats) *stats = local;
  return out;
}

inline std::vector<RatedTranslation> ConvertWmtTsvFile(
    const std::string& path, const WmtTsvOptions& options,
    WmtConversionStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return ConvertWmtTsv(in, options, stats);
}

}  // namespace mqmeval
