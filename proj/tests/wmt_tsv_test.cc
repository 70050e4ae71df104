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

#include "mqmeval/wmt_tsv.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

namespace mqmeval {
namespace {

std::vector<RatedTranslation> Convert(const std::string& tsv,
                                      WmtConversionStats* stats = nullptr) {
  std::istringstream in(tsv);
  return ConvertWmtTsv(in, {"en-de", "wmt", "round1"}, stats);
}

std::string Row(const std::string& system, int seg, const std::string& rater,
                const std::string& target, const std::string& category,
                const std::string& severity, const std::string& source = "src") {
  return system + "\tdoc\t" + std::to_string(seg) + "\t" + rater + "\t" + source +
         "\t" + target + "\t" + category + "\t" + severity + "\n";
}

TEST(StripErrorTagsTest, OffsetsAreScalarValues) {
  const TaggedText t = StripErrorTags("a <v>bad</v> word");
  EXPECT_EQ(t.text, "a bad word");
  ASSERT_TRUE(t.span);
  EXPECT_EQ(t.span->first, 2u);
  EXPECT_EQ(t.span->second, 5u);
  const TaggedText z = StripErrorTags("我们<v>的国</v>家");
  EXPECT_EQ(z.span->first, 2u);
  EXPECT_EQ(z.span->second, 4u);
}

TEST(StripErrorTagsTest, MalformedTagsAreTagErrors) {
  EXPECT_THROW(StripErrorTags("a <v>bad word"), TagError);
  EXPECT_THROW(StripErrorTags("a bad</v> word"), TagError);
  EXPECT_THROW(StripErrorTags("<v>a <v>b</v></v>"), TagError);
  EXPECT_THROW(StripErrorTags("<v>a</v> <v>b</v>"), TagError);
  EXPECT_FALSE(StripErrorTags("plain").span);
}

TEST(WmtTsvTest, SingleErrorRow) {
  const auto records = Convert(Row("s", 1, "r", "a <v>bad</v> word", "Accuracy/Mistranslation", "Major"));
  ASSERT_EQ(records.size(), 1u);
  ASSERT_EQ(records[0].errors.size(), 1u);
  const ErrorSpan& e = records[0].errors[0];
  EXPECT_EQ(e.span_text, "bad");
  EXPECT_EQ(e.start, 2u);
  EXPECT_EQ(e.end, 5u);
  EXPECT_EQ(e.severity, Severity::kMajor);
  EXPECT_EQ(e.category.str(), "accuracy/mistranslation");
}

TEST(WmtTsvTest, NoErrorRowGivesEmptyErrors) {
  const auto records = Convert(Row("s", 1, "r", "fine", "No-error", "No-error"));
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(records[0].errors.empty());
}

TEST(WmtTsvTest, RowsOfOneSegmentAggregateSorted) {
  const auto records =
      Convert(Row("s", 1, "r", "a bad <v>word</v>", "Fluency/Grammar", "Minor") +
              Row("s", 1, "r", "<v>a</v> bad word", "Accuracy/Omission", "Major"));
  ASSERT_EQ(records.size(), 1u);
  ASSERT_EQ(records[0].errors.size(), 2u);
  EXPECT_EQ(records[0].errors[0].span_text, "a");
  EXPECT_EQ(records[0].errors[1].span_text, "word");
}

TEST(WmtTsvTest, InconsistentTargetIsConsistencyError) {
  EXPECT_THROW(Convert(Row("s", 1, "r", "a <v>b</v>", "Other", "Minor") +
                       Row("s", 1, "r", "a <v>c</v>", "Other", "Minor")),
               ConsistencyError);
  EXPECT_THROW(Convert(Row("s", 1, "r1", "a <v>b</v>", "Other", "Minor") +
                       Row("s", 1, "r2", "<v>a</v> b", "Other", "Minor")),
               ConsistencyError);
}

TEST(WmtTsvTest, BadShapeIsParseError) {
  EXPECT_THROW(Convert("s\tdoc\t1\n"), ParseError);
  EXPECT_THROW(Convert(Row("s", 1, "r", "x", "Other", "Severe")), ParseError);
  EXPECT_THROW(Convert("s\tdoc\tx1\tr\tsrc\tt\tOther\tMinor\n"), ParseError);
}

TEST(WmtTsvTest, FixtureFileStatistics) {
  WmtConversionStats stats;
  const auto records =
      ConvertWmtTsvFile(testing::DataPath("wmt_sample.tsv"), {"en-de", "wmt", "round1"}, &stats);
  EXPECT_EQ(stats.rows, 5u);
  EXPECT_EQ(stats.records, 4u);
  EXPECT_EQ(stats.errors, 3u);
  EXPECT_EQ(stats.dropped_spanless, 1u);
  ASSERT_EQ(records.size(), 4u);
  // Sorted by (segment, system).
  EXPECT_EQ(records[0].system.str(), "sysA");
  EXPECT_EQ(records[0].source_key.seg_id, 1);
  EXPECT_EQ(records[3].errors[0].span_text, "Mörgen");
  EXPECT_EQ(records[3].errors[0].start, 6u);
}

TEST(WmtTsvTest, SpansSurviveCanonicalRoundTrip) {
  const auto records =
      ConvertWmtTsvFile(testing::DataPath("wmt_sample.tsv"), {"en-de", "wmt", "round1"});
  std::ostringstream out;
  WriteRatings(out, records);
  std::istringstream in(out.str());
  const auto back = ReadRatings(in);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    ASSERT_EQ(back[i].errors.size(), records[i].errors.size());
    for (std::size_t k = 0; k < back[i].errors.size(); ++k) {
      EXPECT_EQ(back[i].errors[k].span_text, records[i].errors[k].span_text);
    }
  }
}

}  // namespace
}  // namespace mqmeval
