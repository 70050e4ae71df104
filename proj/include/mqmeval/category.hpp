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

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mqmeval/errors.hpp"
#include "mqmeval/types.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

// Main categories and their subcategories as listed in the AutoMQM prompt.
struct TaxonomyEntry {
  std::string_view main;
  std::vector<std::string_view> subs;
};

inline const std::array<TaxonomyEntry, 7>& Taxonomy() {
  static const std::array<TaxonomyEntry, 7> kTaxonomy = {{
      {"accuracy",
       {"addition", "mistranslation", "omission", "untranslated text"}},
      {"fluency",
       {"character encoding", "grammar", "inconsistency", "punctuation",
        "register", "spelling"}},
      {"style", {"awkward"}},
      {"terminology", {"inappropriate for context", "inconsistent use"}},
      {"non-translation", {}},
      {"other", {}},
      {"no-error", {}},
  }};
  return kTaxonomy;
}

inline bool IsKnownMainCategory(std::string_view main) {
  for (const auto& entry : Taxonomy()) {
    if (entry.main == main) return true;
  }
  return false;
}

inline bool IsKnownSubcategory(std::string_view main, std::string_view sub) {
  for (const auto& entry : Taxonomy()) {
    if (entry.main != main) continue;
    for (std::string_view s : entry.subs) {
      if (s == sub) return true;
    }
  }
  return false;
}

// Case-folds, trims and splits on the first '/'. Subcategories of known main
// categories are kept verbatim (annotators use variants such as
// "unnatural or awkward"); unknown main categories become other/<raw>.
inline CategoryPath NormalizeCategory(std::string_view raw) {
  const std::string folded = utf8::CaseFold(utf8::Trim(raw));
  if (folded.empty()) throw InvalidCategory("empty category string");
  const std::size_t slash = folded.find('/');
  std::string main = utf8::Trim(folded.substr(0, slash));
  std::optional<std::string> sub;
  if (slash != std::string::npos) {
    std::string s = utf8::Trim(folded.substr(slash + 1));
    if (!s.empty()) sub = std::move(s);
  }
  if (main.empty()) throw InvalidCategory("empty main category in \"" +
                                          std::string(raw) + "\"");
  if (!IsKnownMainCategory(main)) {
    return CategoryPath{"other", folded};
  }
  return CategoryPath{std::move(main), std::move(sub)};
}

}  // namespace mqmeval
