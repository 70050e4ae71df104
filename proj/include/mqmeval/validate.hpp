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

#include <set>
#include <utility>
#include <vector>

#include "mqmeval/types.hpp"

namespace mqmeval {

struct ValidationReport {
  struct Violation {
    SourceKey segment;
    std::set<RaterId> raters;
  };
  struct Hole {
    RoundId round;
    SystemId system;
    SourceKey segment;
  };
  std::vector<Violation> pseudo_sxs_violations;
  std::vector<Hole> coverage_holes;

  bool ok() const {
    return pseudo_sxs_violations.empty() && coverage_holes.empty();
  }
};

// Checks that every segment of `round` was rated by a single rater across
// systems, and lists unrated (system, segment) cells.
inline ValidationReport ValidatePseudoSxs(const TestSuite& suite,
                                          const RoundId& round) {
  const auto& systems = suite.Round(round);
  ValidationReport report;
  for (std::size_t i = 0; i < suite.segments.size(); ++i) {
    std::set<RaterId> raters;
    for (const auto& [system, cells] : systems) {
      if (cells[i].empty()) {
        report.coverage_holes.push_back({round, system, suite.segments[i].key});
      }
      for (const auto& r : cells[i]) raters.insert(r.rater);
    }
    if (raters.size() > 1) {
      report.pseudo_sxs_violations.push_back(
          {suite.segments[i].key, std::move(raters)});
    }
  }
  return report;
}

}  // namespace mqmeval
