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

// Parsing of model responses back into typed ratings.

#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mqmeval/category.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/types.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

using CharRange = std::pair<std::size_t, std::size_t>;

// Leftmost occurrence of `span_text` in `hypothesis` (scalar offsets) that
// does not overlap a range in `consumed`. The match is appended to
// `consumed`.
inline std::optional<CharRange> AlignSpan(std::string_view hypothesis,
                                          std::string_view span_text,
                                          std::vector<CharRange>& consumed) {
  if (span_text.empty()) return std::nullopt;
  const std::size_t span_len = utf8::Length(span_text);
  std::size_t byte_pos = 0;
  std::size_t char_pos = 0;  // scalar index of byte_pos
  while (true) {
    const std::size_t found = hypothesis.find(span_text, byte_pos);
    if (found == std::string_view::npos) return std::nullopt;
    char_pos += utf8::Length(hypothesis.substr(byte_pos, found - byte_pos));
    byte_pos = found;
    const CharRange candidate{char_pos, char_pos + span_len};
    bool overlaps = false;
    for (const auto& [a, b] : consumed) {
      if (candidate.first < b && a < candidate.second) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) {
      consumed.push_back(candidate);
      return candidate;
    }
    // Advance one scalar value.
    std::size_t next = byte_pos + 1;
    while (next < hypothesis.size() &&
           (static_cast<unsigned char>(hypothesis[next]) & 0xC0) == 0x80) {
      ++next;
    }
    byte_pos = next;
    ++char_pos;
  }
}

struct ParseStats {
  std::size_t parsed_errors = 0;
  std::size_t dropped_unalignable = 0;
  std::size_t repaired = 0;
};

struct ParsedResponse {
  std::vector<ErrorSpan> errors;
  ParseStats stats;
};

namespace internal {

// Removes a surrounding ``` / ```json fence. Returns true if one was found.
inline bool StripCodeFence(std::string& text) {
  if (text.rfind("```", 0) != 0) return false;
  const std::size_t newline = text.find('\n');
  if (newline == std::string::npos) return false;
  std::string body = text.substr(newline + 1);
  body = utf8::Trim(body);
  if (body.size() < 3 || body.compare(body.size() - 3, 3, "```") != 0) {
    return false;
  }
  text = utf8::Trim(body.substr(0, body.size() - 3));
  return true;
}

// Drops commas directly followed (modulo whitespace) by ']' or '}', outside
// string literals.
inline bool RemoveTrailingCommas(std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  bool escaped = false;
  bool changed = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == ',') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\n' ||
                                 text[j] == '\t' || text[j] == '\r')) {
        ++j;
      }
      if (j < text.size() && (text[j] == ']' || text[j] == '}')) {
        changed = true;
        continue;
      }
    }
    out.push_back(c);
  }
  if (changed) text = std::move(out);
  return changed;
}

inline std::string FieldString(const nlohmann::json& item, const char* name) {
  const auto it = item.find(name);
  if (it == item.end() || !it->is_string()) {
    throw ResponseParseError(std::string("error object lacks string field \"") +
                             name + "\": " + item.dump());
  }
  return it->get<std::string>();
}

}  // namespace internal

// Parses an AutoMQM response against the test hypothesis. Repairs are
// limited to stripping a surrounding code fence, removing trailing commas
// and wrapping a bare object in an array.
inline ParsedResponse ParseAutoMqmResponse(std::string_view text,
                                           std::string_view hypothesis) {
  ParsedResponse out;
  std::string body = utf8::Trim(text);
  if (internal::StripCodeFence(body)) ++out.stats.repaired;
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) {
    if (internal::RemoveTrailingCommas(body)) {
      ++out.stats.repaired;
      doc = nlohmann::json::parse(body, nullptr, false);
    }
  }
  if (doc.is_discarded()) {
    throw ResponseParseError("response is not valid JSON: " +
                             std::string(text.substr(0, 200)));
  }
  if (doc.is_object()) {
    // A bare no-error object is a valid "nothing found" answer; any other
    // bare object is accepted as a one-element array and counted as a repair.
    const auto cat = doc.find("category");
    const bool no_error = cat != doc.end() && cat->is_string() &&
                          utf8::CaseFold(utf8::Trim(cat->get<std::string>())) ==
                              "no-error";
    if (!no_error) ++out.stats.repaired;
    doc = nlohmann::json::array({doc});
  }
  if (!doc.is_array()) {
    throw ResponseParseError("response is neither an array nor an object");
  }
  std::vector<CharRange> consumed;
  for (const auto& item : doc) {
    if (!item.is_object()) {
      throw ResponseParseError("array entry is not an object: " + item.dump());
    }
    const std::string raw_category = internal::FieldString(item, "category");
    CategoryPath category;
    try {
      category = NormalizeCategory(raw_category);
    } catch (const InvalidCategory& err) {
      throw ResponseParseError(err.what());
    }
    if (category.is_no_error()) continue;
    const std::string raw_severity = internal::FieldString(item, "severity");
    const auto severity = ParseSeverity(raw_severity);
    if (severity && *severity == Severity::kNeutral) continue;
    if (!severity) {
      throw ResponseParseError("unknown severity \"" + raw_severity + "\"");
    }
    const std::string span = internal::FieldString(item, "span");
    const auto range = AlignSpan(hypothesis, span, consumed);
    if (!range) {
      ++out.stats.dropped_unalignable;
      continue;
    }
    ErrorSpan e;
    e.span_text = span;
    e.start = range->first;
    e.end = range->second;
    e.severity = *severity;
    e.category = std::move(category);
    out.errors.push_back(std::move(e));
  }
  SortSpans(out.errors);
  out.stats.parsed_errors = out.errors.size();
  return out;
}

// First [[x]] number, else the first bare number. Values outside [0, 100]
// are rejected, not clamped.
inline double ParseDaResponse(std::string_view text) {
  static const std::regex kBracketed(R"(\[\[\s*([-+]?\d+(?:\.\d+)?)\s*\]\])");
  // A bare number must stand alone: digits inside tokens such as "v2" or
  // "kal1x0" are not scores.
  static const std::regex kBare(
      R"((?:^|[^A-Za-z0-9_.])([-+]?\d+(?:\.\d+)?)(?![A-Za-z0-9_]))");
  const std::string s(text);
  std::smatch m;
  std::string number;
  if (std::regex_search(s, m, kBracketed)) {
    number = m[1].str();
  } else if (std::regex_search(s, m, kBare)) {
    number = m[1].str();
  } else {
    throw ResponseParseError("no score in response: " + s.substr(0, 200));
  }
  const double value = std::stod(number);
  if (value < 0.0 || value > 100.0) {
    throw RangeError("score " + number + " outside [0, 100]");
  }
  return value;
}

}  // namespace mqmeval
