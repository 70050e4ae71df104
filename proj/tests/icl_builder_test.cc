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

#include "mqmeval/icl_builder.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "mqmeval/canonical.hpp"
#include "mqmeval/synthetic.hpp"
#include "test_util.hpp"

namespace mqmeval {
namespace {

using testing::Err;
using testing::Rating;

TestSuite Synthetic(std::size_t systems, std::size_t segments,
                    std::size_t rounds = 1, double hole_rate = 0.0,
                    std::uint64_t seed = 0) {
  SyntheticOptions opt;
  opt.systems = systems;
  opt.segments = segments;
  opt.rounds = rounds;
  opt.hole_rate = hole_rate;
  opt.seed = seed;
  return SyntheticSuite(opt);
}

BuildOptions With(Strategy s, std::uint64_t seed = 0) {
  BuildOptions o;
  o.strategy = s;
  o.seed = seed;
  return o;
}

std::multiset<std::string> Keys(const std::vector<RatedTranslation>& icl) {
  std::multiset<std::string> out;
  for (const auto& r : icl) out.insert(r.source_key.str() + "|" + r.system.str());
  return out;
}

TEST(SpecialistTest, HoldOneOutSameSourceSortedBySystem) {
  const TestSuite suite = Synthetic(12, 20);
  for (const SystemId& target : suite.Systems(RoundId("round1"))) {
    const auto bundles = BuildSpecialist(suite, target, {});
    ASSERT_EQ(bundles.size(), 20u);
    for (const auto& b : bundles) {
      ASSERT_EQ(b.icl.size(), 11u);
      EXPECT_EQ(b.strategy, Strategy::kSpecialist);
      for (std::size_t k = 0; k < b.icl.size(); ++k) {
        EXPECT_NE(b.icl[k].system, target);
        EXPECT_EQ(b.icl[k].source_key, b.test.source_key);
        EXPECT_EQ(b.icl[k].rater, b.test.rater);
        if (k > 0) {
          EXPECT_LT(b.icl[k - 1].system, b.icl[k].system);
        }
      }
    }
  }
}

TEST(SpecialistTest, TwoSystemsGiveOneExample) {
  const auto bundles = BuildSpecialist(Synthetic(2, 5), SystemId("sys01"), {});
  for (const auto& b : bundles) EXPECT_EQ(b.icl.size(), 1u);
}

TEST(SpecialistTest, HoleShortensBundleAndIsLogged) {
  const auto suite = AssembleSuites({Rating("A", "r", 1, "a"), Rating("B", "r", 1, "b"),
                                     Rating("C", "r", 1, "c"), Rating("A", "r", 2, "a2"),
                                     Rating("B", "r", 2, "b2")})[0];
  BuildLog log;
  const auto bundles = BuildSpecialist(suite, SystemId("A"), {}, &log);
  ASSERT_EQ(bundles.size(), 2u);
  EXPECT_EQ(bundles[0].icl.size(), 2u);
  EXPECT_EQ(bundles[1].icl.size(), 1u);
  EXPECT_EQ(log.short_icl, 1u);
  BuildLog c_log;
  EXPECT_EQ(BuildSpecialist(suite, SystemId("C"), {}, &c_log).size(), 1u);
  EXPECT_EQ(c_log.test_holes, 1u);
}

TEST(SpecialistTest, EmptyIclIsEmittedAndCounted) {
  const auto suite = AssembleSuites({Rating("A", "r", 1, "a"), Rating("B", "r", 2, "b")})[0];
  BuildLog log;
  const auto bundles = BuildSpecialist(suite, SystemId("A"), {}, &log);
  ASSERT_EQ(bundles.size(), 1u);
  EXPECT_TRUE(bundles[0].icl.empty());
  EXPECT_EQ(log.empty_icl, 1u);
}

TEST(SpecialistTest, UnknownSystemIsBuildError) {
  EXPECT_THROW(BuildSpecialist(Synthetic(3, 2), SystemId("nope"), {}), BuildError);
}

TEST(ShuffledTest, CountsMatchSpecialistAndNoSameSystem) {
  const TestSuite suite = Synthetic(6, 15, 1, 0.1);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto all = BuildShuffledAll(suite, With(Strategy::kShuffled, seed));
    for (const auto& [target, bundles] : all) {
      const auto spec = BuildSpecialist(suite, target, {});
      ASSERT_EQ(bundles.size(), spec.size());
      for (std::size_t k = 0; k < bundles.size(); ++k) {
        EXPECT_EQ(bundles[k].icl.size(), spec[k].icl.size());
        EXPECT_EQ(bundles[k].test, spec[k].test);
        EXPECT_EQ(bundles[k].seed, seed);
        for (const auto& r : bundles[k].icl) EXPECT_NE(r.system, target);
      }
    }
  }
}

TEST(ShuffledTest, PoolIsAPermutationOfSpecialistPool) {
  const TestSuite suite = Synthetic(5, 8);
  std::multiset<std::string> spec_pool, shuf_pool;
  const auto all = BuildShuffledAll(suite, With(Strategy::kShuffled, 7));
  for (const auto& [target, bundles] : all) {
    for (const auto& b : BuildSpecialist(suite, target, {})) {
      const auto k = Keys(b.icl);
      spec_pool.insert(k.begin(), k.end());
    }
    for (const auto& b : bundles) {
      const auto k = Keys(b.icl);
      shuf_pool.insert(k.begin(), k.end());
    }
  }
  EXPECT_EQ(spec_pool, shuf_pool);
}

TEST(ShuffledTest, SeedsChangeAssignmentAndAreDeterministic) {
  const TestSuite suite = Synthetic(5, 10);
  const auto a = BuildShuffled(suite, SystemId("sys02"), With(Strategy::kShuffled, 1));
  const auto b = BuildShuffled(suite, SystemId("sys02"), With(Strategy::kShuffled, 1));
  const auto c = BuildShuffled(suite, SystemId("sys02"), With(Strategy::kShuffled, 2));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(ShuffledTest, ExtractionMatchesAllSystemsBuild) {
  const TestSuite suite = Synthetic(4, 6);
  const auto all = BuildShuffledAll(suite, With(Strategy::kShuffled, 3));
  EXPECT_EQ(BuildShuffled(suite, SystemId("sys03"), With(Strategy::kShuffled, 3)),
            all.at(SystemId("sys03")));
}

TEST(ShuffledTest, DegenerateSuites) {
  const auto one = AssembleSuites({Rating("A", "r", 1, "a")})[0];
  EXPECT_TRUE(BuildShuffled(one, SystemId("A"), With(Strategy::kShuffled))[0].icl.empty());
  // Two systems admit exactly one valid assignment; repair must find it.
  const auto two = AssembleSuites({Rating("A", "r", 1, "a"), Rating("B", "r", 1, "b")})[0];
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto all = BuildShuffledAll(two, With(Strategy::kShuffled, seed));
    EXPECT_EQ(all.at(SystemId("A"))[0].icl[0].system, SystemId("B"));
    EXPECT_EQ(all.at(SystemId("B"))[0].icl[0].system, SystemId("A"));
  }
}

TEST(FixedDiffTest, DonorIsOtherSegmentSameRaterAndCountsMatch) {
  const TestSuite suite = Synthetic(6, 18);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (const SystemId& target : suite.Systems(RoundId("round1"))) {
      BuildLog log;
      const auto bundles =
          BuildFixedDifferentSource(suite, target, With(Strategy::kFixedDifferentSource, seed), &log);
      const auto spec = BuildSpecialist(suite, target, {});
      ASSERT_EQ(bundles.size(), spec.size());
      EXPECT_EQ(log.skipped_bundles, 0u);
      for (std::size_t k = 0; k < bundles.size(); ++k) {
        const auto& b = bundles[k];
        ASSERT_EQ(b.icl.size(), spec[k].icl.size());
        std::set<SourceKey> donors;
        for (const auto& r : b.icl) {
          donors.insert(r.source_key);
          EXPECT_NE(r.system, target);
          EXPECT_EQ(r.rater, b.test.rater);
        }
        ASSERT_EQ(donors.size(), 1u);
        EXPECT_NE(*donors.begin(), b.test.source_key);
      }
    }
  }
}

TEST(FixedDiffTest, SingleSegmentPerRaterSkipsAll) {
  SyntheticOptions opt;
  opt.systems = 4;
  opt.segments = 3;
  opt.raters = 3;
  BuildLog log;
  const auto bundles = BuildFixedDifferentSource(SyntheticSuite(opt), SystemId("sys01"),
                                                 With(Strategy::kFixedDifferentSource), &log);
  EXPECT_TRUE(bundles.empty());
  EXPECT_EQ(log.skipped_bundles, 3u);
  ASSERT_FALSE(log.messages.empty());
  EXPECT_NE(log.messages[0].find("BuildError"), std::string::npos);
}

TEST(FixedDiffTest, TwelveSystemsGiveElevenExamples) {
  const TestSuite suite = Synthetic(12, 30);
  const auto bundles = BuildFixedDifferentSource(suite, SystemId("sys05"),
                                                 With(Strategy::kFixedDifferentSource, 4));
  ASSERT_EQ(bundles.size(), 30u);
  for (const auto& b : bundles) EXPECT_EQ(b.icl.size(), 11u);
}

TEST(FilterTest, DropsMatchingSpansAndIdenticalTranslations) {
  const std::string test_t = "in the country we live";
  const std::string same = test_t;
  const std::string other = "the country is far";
  PromptBundle b;
  b.test = Rating("T", "r", 1, test_t, {Err(test_t, "the country", Severity::kMajor)});
  b.icl = {Rating("A", "r", 1, same, {Err(same, "we")}),
           Rating("B", "r", 1, other,
                  {Err(other, "the country", Severity::kMinor, "style/awkward"),
                   Err(other, "far")})};
  const auto out = FilterExactMatches({b});
  ASSERT_EQ(out[0].icl.size(), 1u);
  EXPECT_EQ(out[0].icl[0].system, SystemId("B"));
  ASSERT_EQ(out[0].icl[0].errors.size(), 1u);
  EXPECT_EQ(out[0].icl[0].errors[0].span_text, "far");
  EXPECT_TRUE(out[0].filter_applied);
  EXPECT_EQ(FilterExactMatches(out), out);
}

TEST(FilterTest, ComparesNfc) {
  const std::string composed = "caf\xC3\xA9";
  const std::string decomposed = "cafe\xCC\x81";
  PromptBundle b;
  b.test = Rating("T", "r", 1, composed);
  b.icl = {Rating("A", "r", 1, decomposed)};
  EXPECT_TRUE(FilterExactMatches({b})[0].icl.empty());
}

TEST(SubsetTest, NestedAcrossSizesAndKeepsOrder) {
  const TestSuite suite = Synthetic(12, 10);
  const auto full = BuildSpecialist(suite, SystemId("sys01"), {});
  std::vector<PromptBundle> prev;
  for (std::size_t n = 1; n <= 11; ++n) {
    const auto cur = TakeNestedSubset(full, n, 5);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      ASSERT_EQ(cur[k].icl.size(), n);
      EXPECT_TRUE(std::is_sorted(cur[k].icl.begin(), cur[k].icl.end(),
                                 [](const auto& a, const auto& b) { return a.system < b.system; }));
      if (!prev.empty()) {
        for (const auto& r : prev[k].icl) {
          EXPECT_NE(std::find(cur[k].icl.begin(), cur[k].icl.end(), r), cur[k].icl.end());
        }
      }
    }
    prev = cur;
  }
  EXPECT_EQ(TakeNestedSubset(full, 11, 5), full);
}

TEST(SubsetTest, SeedsDifferAndOversizeIsLogged) {
  const auto full = BuildSpecialist(Synthetic(12, 10), SystemId("sys01"), {});
  EXPECT_NE(TakeNestedSubset(full, 3, 1), TakeNestedSubset(full, 3, 2));
  BuildLog log;
  const auto big = TakeNestedSubset(full, 20, 1, &log);
  EXPECT_EQ(big, full);
  EXPECT_EQ(log.truncated_subsets, full.size());
  EXPECT_THROW(TakeNestedSubset(full, 0, 1), UsageError);
}

TEST(AugmentTest, ShuffledPrefixSpecialistSuffix) {
  const TestSuite suite = Synthetic(12, 6);
  const SystemId target("sys04");
  const auto spec = BuildSpecialist(suite, target, {});
  const auto shuf = BuildShuffled(suite, target, With(Strategy::kShuffled, 2));
  const auto aug = AugmentWithShuffled(spec, shuf);
  for (std::size_t k = 0; k < aug.size(); ++k) {
    ASSERT_EQ(aug[k].icl.size(), 22u);
    EXPECT_EQ(aug[k].strategy, Strategy::kAugmented);
    EXPECT_TRUE(std::equal(shuf[k].icl.begin(), shuf[k].icl.end(), aug[k].icl.begin()));
    EXPECT_TRUE(std::equal(spec[k].icl.begin(), spec[k].icl.end(), aug[k].icl.begin() + 11));
  }
  EXPECT_EQ(AugmentWithShuffled(spec, {}), spec);
  auto wrong = shuf;
  wrong.pop_back();
  EXPECT_THROW(AugmentWithShuffled(spec, wrong), AlignmentError);
  std::swap(wrong.front(), wrong.back());
  wrong.push_back(shuf.back());
  EXPECT_THROW(AugmentWithShuffled(spec, wrong), AlignmentError);
}

TEST(RoundsTest, SubstituteIdentityAndCrossRound) {
  const TestSuite suite = Synthetic(5, 9, 2);
  const SystemId target("sys02");
  EXPECT_EQ(SubstituteIclRound(suite, target, RoundId("round1"), RoundId("round1")),
            BuildSpecialist(suite, target, {}));
  for (const auto& b : SubstituteIclRound(suite, target, RoundId("round2"), RoundId("round1"))) {
    EXPECT_EQ(b.test.round, RoundId("round1"));
    for (const auto& r : b.icl) {
      EXPECT_EQ(r.round, RoundId("round2"));
      EXPECT_NE(r.rater, b.test.rater);
    }
  }
  EXPECT_THROW(SubstituteIclRound(suite, target, RoundId("round9"), RoundId("round1")),
               RoundError);
}

TEST(RoundsTest, MergedRoundsDoubleTheIclCount) {
  const TestSuite suite = Synthetic(5, 9, 3);
  BuildOptions opts;
  opts.icl_rounds = {RoundId("round2"), RoundId("round3")};
  opts.eval_round = RoundId("round1");
  for (const auto& b : BuildSpecialist(suite, SystemId("sys01"), opts)) {
    EXPECT_EQ(b.icl.size(), 8u);
  }
  TestSuite copy = suite;
  const RoundId self = MergeRounds(copy, {RoundId("round2"), RoundId("round2")}, false);
  EXPECT_EQ(copy.Round(self).at(SystemId("sys01"))[0].size(), 2u);
  TestSuite dedup = suite;
  const RoundId once = MergeRounds(dedup, {RoundId("round2"), RoundId("round2")}, true);
  EXPECT_EQ(dedup.Round(once).at(SystemId("sys01"))[0].size(), 1u);
  EXPECT_THROW(MergeRounds(copy, {RoundId("round2")}, false), RoundError);
}

TEST(BuildBundlesTest, DeterministicForEveryStrategy) {
  const TestSuite suite = Synthetic(6, 12);
  for (Strategy s : {Strategy::kSpecialist, Strategy::kShuffled,
                     Strategy::kFixedDifferentSource, Strategy::kAugmented}) {
    BuildOptions o = With(s, 11);
    o.filter = true;
    o.subset_size = 3;
    EXPECT_EQ(BuildBundles(suite, SystemId("sys03"), o),
              BuildBundles(suite, SystemId("sys03"), o));
  }
}

}  // namespace
}  // namespace mqmeval
