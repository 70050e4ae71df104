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

// Segment-level pairwise accuracy with tie calibration (Acc23).
//
// Within each group (a source segment) every unordered pair of items is
// compared. A metric predicts a tie when its scores differ by at most
// epsilon; the calibrated epsilon maximizes accuracy over the candidate set
// {0} U {|m_i - m_j|}. Accuracy only changes at those breakpoints, so the
// search below is exact.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mqmeval/errors.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

struct PairwiseItem {
  SystemId system;
  double metric = 0.0;
  double gold = 0.0;
};

struct PairwiseInstance {
  std::string group;
  std::vector<PairwiseItem> items;
};

struct Acc23Result {
  double accuracy = 0.0;
  double epsilon = 0.0;
  std::size_t pairs = 0;
};

inline int Sign(double x) { return (x > 0) - (x < 0); }

// Accuracy at a fixed epsilon.
inline double PairwiseAccuracy(const std::vector<PairwiseInstance>& instances,
                               double epsilon) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& inst : instances) {
    const auto& it = inst.items;
    for (std::size_t a = 0; a < it.size(); ++a) {
      for (std::size_t b = a + 1; b < it.size(); ++b) {
        const double dm = it[a].metric - it[b].metric;
        const double dg = it[a].gold - it[b].gold;
        const int predicted = std::abs(dm) <= epsilon ? 0 : Sign(dm);
        correct += predicted == Sign(dg);
        ++total;
      }
    }
  }
  if (total == 0) throw MetaEvalError("no pairs");
  return static_cast<double>(correct) / static_cast<double>(total);
}

inline Acc23Result Acc23(const std::vector<PairwiseInstance>& instances) {
  struct Pair {
    double gap;        // |m_a - m_b|
    bool tie_correct;  // correct if predicted tie
    bool order_correct;  // correct if predicted by metric order
  };
  std::vector<Pair> pairs;
  for (const auto& inst : instances) {
    const auto& it = inst.items;
    for (std::size_t a = 0; a < it.size(); ++a) {
      for (std::size_t b = a + 1; b < it.size(); ++b) {
        const double dm = it[a].metric - it[b].metric;
        const int gold = Sign(it[a].gold - it[b].gold);
        pairs.push_back({std::abs(dm), gold == 0, gold != 0 && Sign(dm) == gold});
      }
    }
  }
  if (pairs.empty()) throw MetaEvalError("Acc23 needs at least one pair");
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& x, const Pair& y) { return x.gap < y.gap; });

  // Start with epsilon below every gap: all pairs ordered by the metric.
  std::size_t correct = 0;
  for (const auto& p : pairs) correct += p.order_correct;
  Acc23Result best;
  best.pairs = pairs.size();
  std::size_t best_correct = 0;
  bool have_best = false;
  // Candidate 0 and every gap, ascending. At epsilon = c all pairs with
  // gap <= c predict a tie.
  std::size_t k = 0;
  const auto consider = [&](double eps) {
    while (k < pairs.size() && pairs[k].gap <= eps) {
      correct -= pairs[k].order_correct;
      correct += pairs[k].tie_correct;
      ++k;
    }
    if (!have_best || correct > best_correct) {
      best_correct = correct;
      best.epsilon = eps;
      have_best = true;
    }
  };
  consider(0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].gap > 0.0 && (i == 0 || pairs[i].gap != pairs[i - 1].gap)) {
      consider(pairs[i].gap);
    }
  }
  best.accuracy =
      static_cast<double>(best_correct) / static_cast<double>(pairs.size());
  return best;
}

}  // namespace mqmeval
