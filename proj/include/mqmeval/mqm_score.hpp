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

// MQM penalty scoring. The weight table is a local convention: minor 1,
// minor fluency/punctuation 0.1, major 5, critical 5, non-translation 25.

#include "mqmeval/types.hpp"

namespace mqmeval {

struct MqmWeights {
  double minor = 1.0;
  double minor_punctuation = 0.1;
  double major = 5.0;
  double critical = 5.0;
  double non_translation = 25.0;
};

inline double ErrorWeight(const ErrorSpan& e, const MqmWeights& w = {}) {
  if (e.category.main == "non-translation") return w.non_translation;
  switch (e.severity) {
    case Severity::kNeutral:
      return 0.0;
    case Severity::kMinor:
      return e.category.main == "fluency" && e.category.sub == "punctuation"
                 ? w.minor_punctuation
                 : w.minor;
    case Severity::kMajor:
      return w.major;
    case Severity::kCritical:
      return w.critical;
  }
  return 0.0;
}

// Penalty: higher is worse, 0 for an error-free translation.
inline double MqmScore(const RatedTranslation& rating,
                       const MqmWeights& weights = {}) {
  double total = 0.0;
  for (const ErrorSpan& e : rating.errors) total += ErrorWeight(e, weights);
  return total;
}

}  // namespace mqmeval
