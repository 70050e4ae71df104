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

#include "mqmeval/char_f1.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"

namespace mqmeval {
namespace {

using testing::ErrAt;

constexpr CharLabel N = CharLabel::kNone;
constexpr CharLabel m = CharLabel::kMinor;
constexpr CharLabel M = CharLabel::kMajor;

SourceKey Key(const std::string& lp, std::int64_t seg) { return {lp, "d", seg}; }

TEST(CharLabelsTest, Basics) {
  EXPECT_EQ(CharLabels("abc", {}), (CharLabeling{N, N, N}));
  EXPECT_EQ(CharLabels("abcdef", {ErrAt("abcdef", 0, 3)}),
            (CharLabeling{m, m, m, N, N, N}));
  EXPECT_EQ(CharLabels("abcdef", {ErrAt("abcdef", 0, 3),
                                  ErrAt("abcdef", 2, 5, Severity::kMajor)}),
            (CharLabeling{m, m, M, M, M, N}));
  EXPECT_EQ(CharLabels("abc", {ErrAt("abc", 1, 2, Severity::kCritical)}),
            (CharLabeling{N, M, N}));
  // Lengths are in scalar values.
  EXPECT_EQ(CharLabels("ü国", {}).size(), 2u);
  EXPECT_THROW(CharLabels("ab", {ErrAt("abc", 0, 3)}), SpanIntegrityError);
}

TEST(SegmentCreditTest, Examples) {
  const auto same = SegmentCredit({m, m, M, N}, {m, m, M, N});
  EXPECT_EQ(same.credit_sum, 3.0);
  EXPECT_EQ(same.pred_chars, 3);
  EXPECT_EQ(same.gold_chars, 3);

  const auto worked = SegmentCredit({m, m, m, N, N, N}, {M, M, N, N, N, N});
  EXPECT_EQ(worked.credit_sum, 1.0);
  EXPECT_EQ(worked.pred_chars, 2);
  EXPECT_EQ(worked.gold_chars, 3);

  const auto disjoint = SegmentCredit({m, N, N}, {N, M, M});
  EXPECT_EQ(disjoint.credit_sum, 0.0);
  EXPECT_EQ(disjoint.pred_chars, 2);
  EXPECT_EQ(disjoint.gold_chars, 1);

  EXPECT_THROW(SegmentCredit({N}, {N, N}), LabelingError);
}

TEST(CorpusPrf1Test, WorkedExample) {
  const std::string hyp = "abcdef";
  const auto row = ScoreSegment(Key("en-de", 1), SystemId("s"), hyp,
                                {ErrAt(hyp, 0, 3, Severity::kMinor)},
                                {ErrAt(hyp, 0, 2, Severity::kMajor)});
  const Prf1 p = CorpusPrf1({row});
  EXPECT_NEAR(p.precision, 0.5, 1e-12);
  EXPECT_NEAR(p.recall, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(p.f1, 0.4, 1e-12);
}

TEST(CorpusPrf1Test, ZeroDenominators) {
  const auto row = ScoreSegment(Key("en-de", 1), SystemId("s"), "abc", {}, {});
  const Prf1 p = CorpusPrf1({row});
  EXPECT_EQ(p.precision, 0.0);
  EXPECT_EQ(p.recall, 0.0);
  EXPECT_EQ(p.f1, 0.0);
  EXPECT_EQ(CorpusPrf1({}).f1, 0.0);
}

TEST(CorpusPrf1Test, AllCorrectIsOne) {
  const std::string hyp = "hello world";
  const auto e = std::vector<ErrorSpan>{ErrAt(hyp, 6, 11, Severity::kMajor)};
  const Prf1 p = CorpusPrf1({ScoreSegment(Key("en-de", 1), SystemId("s"), hyp, e, e)});
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.recall, 1.0);
  EXPECT_EQ(p.f1, 1.0);
}

// Independent oracle: enumerate characters directly from spans, without
// going through CharLabels or SegmentCredit.
struct Sums {
  double credit = 0, pred = 0, gold = 0;
};

int OracleLevel(const std::vector<ErrorSpan>& errors, std::size_t i) {
  int level = 0;
  for (const auto& e : errors) {
    if (e.start <= i && i < e.end) {
      level = std::max(level, e.severity == Severity::kMinor ? 1 : 2);
    }
  }
  return level;
}

std::vector<ErrorSpan> RandomSpans(std::mt19937& gen, const std::string& hyp) {
  std::vector<ErrorSpan> out;
  const int n = std::uniform_int_distribution<int>(0, 5)(gen);
  if (hyp.empty()) return out;
  for (int k = 0; k < n; ++k) {
    std::size_t a = std::uniform_int_distribution<std::size_t>(0, hyp.size() - 1)(gen);
    std::size_t b = std::uniform_int_distribution<std::size_t>(a + 1, hyp.size())(gen);
    const Severity sev = std::array{Severity::kMinor, Severity::kMajor,
                                    Severity::kCritical}[gen() % 3];
    out.push_back(ErrAt(hyp, a, b, sev));
  }
  return out;
}

TEST(CorpusPrf1Test, MatchesBruteForceOracle) {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SegmentRow> rows;
    Sums s;
    for (int seg = 0; seg < 20; ++seg) {
      const std::size_t len = std::uniform_int_distribution<std::size_t>(0, 40)(gen);
      const std::string hyp(len, 'x');
      const auto gold = RandomSpans(gen, hyp);
      const auto pred = RandomSpans(gen, hyp);
      rows.push_back(ScoreSegment(Key("en-de", seg), SystemId("s"), hyp, gold, pred));
      for (std::size_t i = 0; i < len; ++i) {
        const int g = OracleLevel(gold, i);
        const int p = OracleLevel(pred, i);
        s.gold += g > 0;
        s.pred += p > 0;
        if (g > 0 && p > 0) s.credit += g == p ? 1.0 : 0.5;
      }
    }
    const Prf1 got = CorpusPrf1(rows);
    const double P = s.pred > 0 ? s.credit / s.pred : 0.0;
    const double R = s.gold > 0 ? s.credit / s.gold : 0.0;
    const double F = P + R > 0 ? 2 * P * R / (P + R) : 0.0;
    EXPECT_NEAR(got.precision, P, 1e-12);
    EXPECT_NEAR(got.recall, R, 1e-12);
    EXPECT_NEAR(got.f1, F, 1e-12);
  }
}

TEST(SegmentCreditTest, SymmetricAndBounded) {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string hyp(std::uniform_int_distribution<int>(1, 30)(gen), 'y');
    const auto a = CharLabels(hyp, RandomSpans(gen, hyp));
    const auto b = CharLabels(hyp, RandomSpans(gen, hyp));
    const auto ab = SegmentCredit(a, b);
    const auto ba = SegmentCredit(b, a);
    EXPECT_EQ(ab.credit_sum, ba.credit_sum);
    EXPECT_EQ(ab.pred_chars, ba.gold_chars);
    EXPECT_LE(ab.credit_sum, static_cast<double>(std::min(ab.pred_chars, ab.gold_chars)));
  }
}

TEST(CorpusPrf1Test, RowOrderDoesNotMatter) {
  std::mt19937 gen(3);
  std::vector<SegmentRow> rows;
  for (int seg = 0; seg < 30; ++seg) {
    const std::string hyp(20, 'z');
    rows.push_back(ScoreSegment(Key(seg % 2 ? "en-de" : "zh-en", seg), SystemId("s"),
                                hyp, RandomSpans(gen, hyp), RandomSpans(gen, hyp)));
  }
  const Prf1 before = CrossLpPrf1(rows, Aggregation::kMicro);
  const Prf1 before_macro = CrossLpPrf1(rows, Aggregation::kMacro);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(rows.begin(), rows.end(), gen);
    // Summation order changes rounding; the tolerance is a few ulps.
    EXPECT_NEAR(CrossLpPrf1(rows, Aggregation::kMicro).f1, before.f1, 1e-12);
    EXPECT_NEAR(CrossLpPrf1(rows, Aggregation::kMacro).f1, before_macro.f1, 1e-12);
  }
}

TEST(CrossLpPrf1Test, UnweightedMeanOverLps) {
  // en-de: perfect on 1 char. zh-en: P = 1, R = 0.5 on a 10-char gold span.
  SegmentRow a{Key("en-de", 1), SystemId("s"), 1.0, 1, 1};
  SegmentRow b{Key("zh-en", 1), SystemId("s"), 5.0, 5, 10};
  const Prf1 p = CrossLpPrf1({a, b}, Aggregation::kMicro);
  EXPECT_NEAR(p.precision, 1.0, 1e-12);
  EXPECT_NEAR(p.recall, 0.75, 1e-12);
  EXPECT_NEAR(p.f1, (1.0 + 2.0 / 3.0) / 2.0, 1e-12);
  const auto per_lp = PerLpPrf1({a, b}, Aggregation::kMicro);
  ASSERT_EQ(per_lp.size(), 2u);
  EXPECT_NEAR(per_lp.at("zh-en").recall, 0.5, 1e-12);
}

TEST(MacroTest, MeanOfSegmentsSkippingDoubleEmpty) {
  SegmentRow full{Key("en-de", 1), SystemId("s"), 2.0, 2, 2};
  SegmentRow half{Key("en-de", 2), SystemId("s"), 1.0, 2, 1};
  SegmentRow empty{Key("en-de", 3), SystemId("s"), 0.0, 0, 0};
  SegmentRow missed{Key("en-de", 4), SystemId("s"), 0.0, 0, 3};
  const Prf1 p = MacroSegmentPrf1({full, half, empty, missed});
  EXPECT_NEAR(p.precision, (1.0 + 0.5 + 0.0) / 3.0, 1e-12);
  EXPECT_NEAR(p.recall, (1.0 + 1.0 + 0.0) / 3.0, 1e-12);
  EXPECT_NEAR(p.f1, (1.0 + 2.0 / 3.0 + 0.0) / 3.0, 1e-12);
  EXPECT_EQ(ParseAggregation("macro"), Aggregation::kMacro);
  EXPECT_THROW(ParseAggregation("weighted"), UsageError);
}

TEST(PerSystemBreakdownTest, PerfectAndBroken) {
  SegmentRow good{Key("en-de", 1), SystemId("good"), 4.0, 4, 4};
  SegmentRow bad{Key("en-de", 1), SystemId("bad"), 0.0, 3, 4};
  const auto by = PerSystemBreakdown({good, bad}, Aggregation::kMicro);
  ASSERT_EQ(by.size(), 2u);
  EXPECT_EQ(by.at(SystemId("good")).f1, 1.0);
  EXPECT_EQ(by.at(SystemId("good")).precision, 1.0);
  EXPECT_EQ(by.at(SystemId("bad")).f1, 0.0);
  EXPECT_EQ(by.at(SystemId("bad")).recall, 0.0);

  const auto single = PerSystemBreakdown({good}, Aggregation::kMicro);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single.at(SystemId("good")).f1, CorpusPrf1({good}).f1);
}

}  // namespace
}  // namespace mqmeval
