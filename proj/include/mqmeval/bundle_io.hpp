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

// Bundle files: one JSON object per line,
//   {"strategy", "seed", "filter_applied", "test": <rating>, "icl": [...]}
// where <rating> uses the canonical record layout.

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqmeval/canonical.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

inline ordered_json BundleToJson(const PromptBundle& b) {
  ordered_json j;
  j["strategy"] = std::string(StrategyName(b.strategy));
  j["seed"] = b.seed ? ordered_json(*b.seed) : ordered_json(nullptr);
  j["filter_applied"] = b.filter_applied;
  j["test"] = RatingToJson(b.test);
  ordered_json icl = ordered_json::array();
  for (const auto& r : b.icl) icl.push_back(RatingToJson(r));
  j["icl"] = std::move(icl);
  return j;
}

inline PromptBundle BundleFromLine(const std::string& text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(line, err.what());
  }
  if (!j.is_object() || !j.contains("test") || !j.contains("icl") ||
      !j["icl"].is_array()) {
    throw ParseError(line, "bundle record needs \"test\" and \"icl\"");
  }
  PromptBundle b;
  try {
    b.strategy = ParseStrategy(j.value("strategy", "specialist"));
  } catch (const UsageError& err) {
    throw ParseError(line, err.what());
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    b.seed = j["seed"].get<std::uint64_t>();
  }
  b.filter_applied = j.value("filter_applied", false);
  b.test = RatingFromLine(j["test"].dump(), line);
  for (const auto& r : j["icl"]) b.icl.push_back(RatingFromLine(r.dump(), line));
  return b;
}

inline void WriteBundles(std::ostream& out,
                         const std::vector<PromptBundle>& bundles) {
  for (const auto& b : bundles) out << BundleToJson(b).dump() << '\n';
}

inline std::vector<PromptBundle> ReadBundles(std::istream& in) {
  std::vector<PromptBundle> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (utf8::Trim(line).empty()) continue;
    out.push_back(BundleFromLine(line, line_no));
  }
  return out;
}

inline std::vector<PromptBundle> LoadBundles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return ReadBundles(in);
}

inline void SaveBundles(const std::string& path,
                        const std::vector<PromptBundle>& bundles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot write " + path);
  WriteBundles(out, bundles);
}

}  // namespace mqmeval
