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

// Paired permutation test on corpus-level character F1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mqmeval/char_f1.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/random.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

enum class Statistic { kF1, kPrecision, kRecall };

struct PermutationResult {
  double p_value = 1.0;
  double observed_delta = 0.0;  // statistic(A) - statistic(B)
  std::size_t resamples = 0;
};

namespace internal {

inline double Pick(const Prf1& s, Statistic stat) {
  switch (stat) {
    case Statistic::kF1:
      return s.f1;
    case Statistic::kPrecision:
      return s.precision;
    case Statistic::kRecall:
      return s.recall;
  }
  return s.f1;
}

// Sorts rows by (key, system) and checks the two sides line up.
inline void AlignRows(std::vector<SegmentRow>& a, std::vector<SegmentRow>& b) {
  const auto by_key = [](const SegmentRow& x, const SegmentRow& y) {
    return std::tie(x.key, x.system) < std::tie(y.key, y.system);
  };
  std::sort(a.begin(), a.end(), by_key);
  std::sort(b.begin(), b.end(), by_key);
  if (a.size() != b.size()) {
    throw AlignmentError("row counts differ: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].key != b[i].key || a[i].system != b[i].system) {
      throw AlignmentError("rows not aligned at " + a[i].key.str() + "/" +
                           a[i].system.str() + " vs " + b[i].key.str() + "/" +
                           b[i].system.str());
    }
    if (a[i].gold_chars != b[i].gold_chars) {
      throw AlignmentError("gold character counts differ at " +
                           a[i].key.str() + "/" + a[i].system.str());
    }
  }
}

// Cross-LP mean statistic from per-LP running sums.
struct LpSums {
  double credit = 0.0;
  double pred = 0.0;
  double gold = 0.0;
};

inline double StatisticFromSums(const std::vector<LpSums>& sums,
                                Statistic stat) {
  double total = 0.0;
  for (const auto& s : sums) {
    total += Pick(Prf1FromSums(s.credit, s.pred, s.gold), stat);
  }
  return sums.empty() ? 0.0 : total / static_cast<double>(sums.size());
}

}  // namespace internal

// Each resample swaps the A and B rows of every aligned segment with
// probability 1/2. p = (count(|delta*| >= |delta|) + 1) / (n + 1).
inline PermutationResult PairedPermutationTest(std::vector<SegmentRow> a,
                                               std::vector<SegmentRow> b,
                                               std::size_t n_resamples,
                                               std::uint64_t seed,
                                               Statistic stat = Statistic::kF1) {
  internal::AlignRows(a, b);
  std::map<std::string, std::size_t> lp_index;
  std::vector<std::size_t> row_lp(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    row_lp[i] = lp_index.emplace(a[i].key.lp, lp_index.size()).first->second;
  }
  const std::size_t n_lp = lp_index.size();

  const auto delta = [&](const std::vector<bool>* swap) {
    std::vector<internal::LpSums> sa(n_lp), sb(n_lp);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool s = swap != nullptr && (*swap)[i];
      const SegmentRow& ra = s ? b[i] : a[i];
      const SegmentRow& rb = s ? a[i] : b[i];
      auto& xa = sa[row_lp[i]];
      auto& xb = sb[row_lp[i]];
      xa.credit += ra.credit_sum;
      xa.pred += static_cast<double>(ra.pred_chars);
      xa.gold += static_cast<double>(ra.gold_chars);
      xb.credit += rb.credit_sum;
      xb.pred += static_cast<double>(rb.pred_chars);
      xb.gold += static_cast<double>(rb.gold_chars);
    }
    return internal::StatisticFromSums(sa, stat) -
           internal::StatisticFromSums(sb, stat);
  };

  PermutationResult result;
  result.resamples = n_resamples;
  result.observed_delta = delta(nullptr);
  const double threshold = std::abs(result.observed_delta);
  Rng rng(seed);
  std::vector<bool> swap(a.size());
  std::size_t count = 0;
  for (std::size_t r = 0; r < n_resamples; ++r) {
    for (std::size_t i = 0; i < swap.size(); ++i) swap[i] = rng.Coin();
    // The slack absorbs summation-order rounding so that the identity
    // permutation always counts.
    if (std::abs(delta(&swap)) >= threshold - 1e-12) ++count;
  }
  result.p_value = static_cast<double>(count + 1) /
                   static_cast<double>(n_resamples + 1);
  return result;
}

}  // namespace mqmeval
