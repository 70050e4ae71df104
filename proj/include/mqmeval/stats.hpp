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

#include <string>
#include <vector>

#include "mqmeval/icl_builder.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

struct IclStats {
  double avg_icl_examples = 0.0;
  double avg_icl_errors = 0.0;
  std::size_t bundles = 0;
};

inline IclStats BundleStats(const std::vector<PromptBundle>& bundles) {
  IclStats stats;
  stats.bundles = bundles.size();
  if (bundles.empty()) return stats;
  double examples = 0.0;
  double errors = 0.0;
  for (const auto& b : bundles) {
    examples += static_cast<double>(b.icl.size());
    for (const auto& r : b.icl) errors += static_cast<double>(r.errors.size());
  }
  stats.avg_icl_examples = examples / static_cast<double>(bundles.size());
  stats.avg_icl_errors = errors / static_cast<double>(bundles.size());
  return stats;
}

// Average specialist ICL count and total ICL error count per test example.
// target_system "all" averages the per-system means over every system of
// the gold round.
inline IclStats SuiteStats(const TestSuite& suite,
                           const std::string& target_system,
                           bool filter_applied,
                           const BuildOptions& base = {}) {
  BuildOptions opts = base;
  opts.strategy = Strategy::kSpecialist;
  opts.filter = filter_applied;
  opts.subset_size.reset();
  opts.augment_with.reset();
  if (target_system != "all") {
    return BundleStats(BuildBundles(suite, SystemId(target_system), opts));
  }
  const RoundId eval = opts.eval_round.value_or(suite.PrimaryRound());
  IclStats total;
  const auto systems = suite.Systems(eval);
  for (const SystemId& system : systems) {
    const IclStats s = BundleStats(BuildBundles(suite, system, opts));
    total.avg_icl_examples += s.avg_icl_examples;
    total.avg_icl_errors += s.avg_icl_errors;
    total.bundles += s.bundles;
  }
  if (!systems.empty()) {
    total.avg_icl_examples /= static_cast<double>(systems.size());
    total.avg_icl_errors /= static_cast<double>(systems.size());
  }
  return total;
}

}  // namespace mqmeval
