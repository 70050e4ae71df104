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

#include "mqmeval/acc23.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace mqmeval {
namespace {

PairwiseInstance Group(const std::string& name, const std::vector<double>& metric,
                       const std::vector<double>& gold) {
  PairwiseInstance inst{name, {}};
  for (std::size_t i = 0; i < metric.size(); ++i) {
    inst.items.push_back({SystemId("s" + std::to_string(i)), metric[i], gold[i]});
  }
  return inst;
}

TEST(Acc23Test, SmallExample) {
  const auto r = Acc23({Group("g", {1, 2, 3}, {1, 1, 3})});
  EXPECT_DOUBLE_EQ(r.accuracy, 2.0 / 3.0);
  EXPECT_EQ(r.pairs, 3u);
  EXPECT_DOUBLE_EQ(PairwiseAccuracy({Group("g", {1, 2, 3}, {1, 1, 3})}, r.epsilon),
                   r.accuracy);
}

TEST(Acc23Test, PerfectMetric) {
  const auto r = Acc23({Group("g", {5, 1, 3, 9}, {5, 1, 3, 9})});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.epsilon, 0.0);
}

TEST(Acc23Test, AllTies) {
  const auto r = Acc23({Group("g", {2, 2, 2}, {7, 7, 7})});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.epsilon, 0.0);
}

TEST(Acc23Test, TieBreakTowardSmallerEpsilon) {
  // Gaps 1 and 3. eps=0 gets the ordered pair right and the tie wrong (1/2);
  // eps=1 gets both right; eps=3 only the tie. Best is 1 at eps 1.
  const auto r = Acc23({Group("a", {0, 1}, {4, 4}), Group("b", {0, 3}, {0, 1})});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.epsilon, 1.0);
  // Every epsilon scores 1/2 here; the smallest candidate wins.
  const auto flat = Acc23({Group("a", {0, 2}, {0, 1}), Group("b", {0, 2}, {3, 3})});
  EXPECT_EQ(flat.accuracy, 0.5);
  EXPECT_EQ(flat.epsilon, 0.0);
}

TEST(Acc23Test, NoPairs) {
  EXPECT_THROW(Acc23({}), MetaEvalError);
  EXPECT_THROW(Acc23({Group("g", {1}, {1})}), MetaEvalError);
  EXPECT_THROW(PairwiseAccuracy({Group("g", {1}, {1})}, 0.0), MetaEvalError);
}

// Oracle: brute-force pair accounting at every point of a dense grid
// plus every midpoint and breakpoint.
double OracleAccuracy(const std::vector<PairwiseInstance>& inst, double eps) {
  int correct = 0, total = 0;
  for (const auto& g : inst) {
    for (std::size_t i = 0; i < g.items.size(); ++i) {
      for (std::size_t j = i + 1; j < g.items.size(); ++j) {
        const double dm = g.items[i].metric - g.items[j].metric;
        const double dg = g.items[i].gold - g.items[j].gold;
        const int pred = std::abs(dm) <= eps ? 0 : (dm > 0 ? 1 : -1);
        const int gold = dg == 0 ? 0 : (dg > 0 ? 1 : -1);
        correct += pred == gold;
        ++total;
      }
    }
  }
  return static_cast<double>(correct) / total;
}

TEST(Acc23Test, MatchesDenseGridOracle) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PairwiseInstance> inst;
    const int groups = std::uniform_int_distribution<int>(1, 6)(gen);
    double max_gap = 0.0;
    for (int g = 0; g < groups; ++g) {
      const int n = std::uniform_int_distribution<int>(2, 5)(gen);
      std::vector<double> m, gold;
      for (int i = 0; i < n; ++i) {
        // Quarter steps keep gaps exact in binary floating point.
        m.push_back(std::uniform_int_distribution<int>(0, 40)(gen) / 4.0);
        gold.push_back(std::uniform_int_distribution<int>(0, 3)(gen));
      }
      for (double a : m) for (double b : m) max_gap = std::max(max_gap, std::abs(a - b));
      inst.push_back(Group("g" + std::to_string(g), m, gold));
    }
    double best = 0.0;
    for (double eps = 0.0; eps <= max_gap + 0.25; eps += 1.0 / 64.0) {
      best = std::max(best, OracleAccuracy(inst, eps));
    }
    const auto r = Acc23(inst);
    EXPECT_EQ(r.accuracy, best);
    EXPECT_EQ(OracleAccuracy(inst, r.epsilon), r.accuracy);
  }
}

}  // namespace
}  // namespace mqmeval
