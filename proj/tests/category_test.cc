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

#include "mqmeval/category.hpp"

#include <gtest/gtest.h>

namespace mqmeval {
namespace {

TEST(CategoryTest, CaseFolds) {
  const CategoryPath c = NormalizeCategory("Accuracy/Mistranslation");
  EXPECT_EQ(c.main, "accuracy");
  EXPECT_EQ(c.sub, "mistranslation");
  EXPECT_EQ(c.str(), "accuracy/mistranslation");
}

TEST(CategoryTest, KeepsAnnotatorSubcategoryVariants) {
  EXPECT_EQ(NormalizeCategory("style/unnatural or awkward").str(),
            "style/unnatural or awkward");
}

TEST(CategoryTest, UnknownMainBecomesOther) {
  const CategoryPath c = NormalizeCategory("Hallucination");
  EXPECT_EQ(c.main, "other");
  EXPECT_EQ(c.sub, "hallucination");
}

TEST(CategoryTest, TrimsAndHandlesBareMain) {
  EXPECT_EQ(NormalizeCategory("  Fluency / Grammar ").str(), "fluency/grammar");
  EXPECT_EQ(NormalizeCategory("Non-translation!").main, "other");
  EXPECT_EQ(NormalizeCategory("non-translation").str(), "non-translation");
  EXPECT_TRUE(NormalizeCategory("No-error").is_no_error());
}

TEST(CategoryTest, EmptyIsInvalid) {
  EXPECT_THROW(NormalizeCategory(""), InvalidCategory);
  EXPECT_THROW(NormalizeCategory("   "), InvalidCategory);
  EXPECT_THROW(NormalizeCategory("/grammar"), InvalidCategory);
}

TEST(CategoryTest, Idempotent) {
  for (const char* raw : {"Accuracy/Mistranslation", "hallucination",
                          "style/unnatural or awkward", "Other", "no-error",
                          "Terminology/Inconsistent use", "x/y/z"}) {
    const CategoryPath once = NormalizeCategory(raw);
    EXPECT_EQ(NormalizeCategory(once.str()), once) << raw;
  }
}

TEST(CategoryTest, TaxonomyMembership) {
  EXPECT_TRUE(IsKnownSubcategory("accuracy", "omission"));
  EXPECT_FALSE(IsKnownSubcategory("accuracy", "grammar"));
  EXPECT_TRUE(IsKnownMainCategory("terminology"));
  EXPECT_FALSE(IsKnownMainCategory("hallucination"));
}

}  // namespace
}  // namespace mqmeval
