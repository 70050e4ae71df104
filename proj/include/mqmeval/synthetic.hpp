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

// Synthetic MQM suites with a known structure, for tests and demos.
//
// Each source segment owns a small vocabulary of planted error words. Every
// system's translation is built from shared filler words plus a random
// subset of its segment's planted words. A rater marks a planted word as an
// error according to a rater-specific deterministic rule, so annotations
// agree within a rater and differ across raters.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mqmeval/canonical.hpp"
#include "mqmeval/mqm_score.hpp"
#include "mqmeval/random.hpp"
#include "mqmeval/types.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

struct SyntheticOptions {
  std::string dataset = "synth";
  std::string lp = "en-de";
  std::size_t systems = 4;
  std::size_t segments = 10;
  std::size_t raters = 3;
  std::size_t rounds = 1;
  std::size_t planted_words = 5;
  bool pseudo_sxs = true;
  // Probability that a system copies the previous system's translation.
  double duplicate_rate = 0.0;
  double hole_rate = 0.0;
  // Probability that a rater marks a given planted word.
  double rater_recall = 0.8;
  std::uint64_t seed = 0;
};

namespace internal {

inline const std::vector<std::string>& FillerWords() {
  static const std::vector<std::string> kWords = {
      "der",   "die",  "das",    "Haus",   "Straße", "groß", "naïve",
      "schön", "über", "Bücher", "heute",  "morgen", "und",  "mit",
      "für",   "Welt", "Zeit",   "Arbeit", "Café",   "Müll"};
  return kWords;
}

inline std::string PlantedWord(std::size_t segment, std::size_t k) {
  static const std::vector<std::string> kStems = {"kal", "mor", "vex", "tül",
                                                  "zan", "pri", "dok", "wen"};
  return kStems[k % kStems.size()] + std::to_string(segment) + "x" +
         std::to_string(k);
}

inline bool RaterMarks(const std::string& rater, const std::string& word,
                       double recall) {
  return static_cast<double>(StableHash(rater + "|" + word) % 1000) <
         recall * 1000.0;
}

inline Severity RaterSeverity(const std::string& rater,
                              const std::string& word) {
  return StableHash(word + "|sev|" + rater) % 3 == 0 ? Severity::kMajor
                                                     : Severity::kMinor;
}

inline CategoryPath WordCategory(const std::string& word) {
  return StableHash(word + "|cat") % 2 == 0
             ? CategoryPath{"accuracy", "mistranslation"}
             : CategoryPath{"fluency", "grammar"};
}

}  // namespace internal

// Annotation of `target` by `rater`: every occurrence of a planted word the
// rater notices becomes an error.
inline std::vector<ErrorSpan> SyntheticAnnotate(
    const std::string& target, const std::vector<std::string>& planted,
    const std::string& rater, double recall) {
  std::vector<ErrorSpan> errors;
  for (const auto& w : planted) {
    if (!internal::RaterMarks(rater, w, recall)) continue;
    std::size_t pos = target.find(w);
    while (pos != std::string::npos) {
      ErrorSpan e;
      e.span_text = w;
      e.start = utf8::CharIndex(target, pos);
      e.end = e.start + utf8::Length(w);
      e.severity = internal::RaterSeverity(rater, w);
      e.category = internal::WordCategory(w);
      errors.push_back(std::move(e));
      pos = target.find(w, pos + w.size());
    }
  }
  SortSpans(errors);
  return errors;
}

inline std::vector<RatedTranslation> SyntheticRatings(
    const SyntheticOptions& opt) {
  Rng rng(opt.seed);
  std::vector<std::string> raters;
  for (std::size_t r = 0; r < opt.raters; ++r) {
    raters.push_back("rater" + std::to_string(r + 1));
  }
  std::vector<RatedTranslation> out;
  for (std::size_t i = 0; i < opt.segments; ++i) {
    std::vector<std::string> planted;
    for (std::size_t k = 0; k < opt.planted_words; ++k) {
      planted.push_back(internal::PlantedWord(i, k));
    }
    const std::string source = "Source sentence " + std::to_string(i) +
                               " about topic " + std::to_string(i % 7) + ".";
    std::vector<std::string> targets(opt.systems);
    for (std::size_t j = 0; j < opt.systems; ++j) {
      if (j > 0 && static_cast<double>(rng.Below(1000)) <
                       opt.duplicate_rate * 1000.0) {
        targets[j] = targets[j - 1];
        continue;
      }
      std::vector<std::string> words;
      const std::size_t n_filler = 5 + static_cast<std::size_t>(rng.Below(5));
      for (std::size_t f = 0; f < n_filler; ++f) {
        const auto& fw = internal::FillerWords();
        words.push_back(fw[rng.Below(fw.size())]);
      }
      const double keep = 0.35 + 0.4 * static_cast<double>(j) /
                                     static_cast<double>(std::max<std::size_t>(opt.systems - 1, 1));
      for (const auto& w : planted) {
        if (static_cast<double>(rng.Below(1000)) < keep * 1000.0) {
          const std::size_t at = static_cast<std::size_t>(rng.Below(words.size() + 1));
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), w);
        }
      }
      std::string t;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w > 0) t += ' ';
        t += words[w];
      }
      t += '.';
      targets[j] = std::move(t);
    }
    for (std::size_t round = 0; round < opt.rounds; ++round) {
      // Pseudo-SxS: one rater per (segment, round); later rounds shift the
      // assignment so each translation gets a different rater per round.
      const std::size_t seg_rater = (i + round) % opt.raters;
      for (std::size_t j = 0; j < opt.systems; ++j) {
        if (static_cast<double>(rng.Below(1000)) < opt.hole_rate * 1000.0) {
          continue;
        }
        const std::size_t rater_idx =
            opt.pseudo_sxs ? seg_rater
                           : static_cast<std::size_t>(rng.Below(opt.raters));
        RatedTranslation r;
        r.dataset = opt.dataset;
        r.round = RoundId("round" + std::to_string(round + 1));
        r.system = SystemId("sys" + std::string(j < 9 ? "0" : "") +
                            std::to_string(j + 1));
        r.rater = RaterId(raters[rater_idx]);
        r.source_key = SourceKey{opt.lp, "doc" + std::to_string(i / 5),
                                 static_cast<std::int64_t>(i)};
        r.source = source;
        r.target = targets[j];
        r.errors = SyntheticAnnotate(r.target, planted, r.rater.str(),
                                     opt.rater_recall);
        const double penalty = MqmScore(r);
        r.score = std::max(0.0, 100.0 - 4.0 * penalty);
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

inline TestSuite SyntheticSuite(const SyntheticOptions& opt) {
  return std::move(AssembleSuites(SyntheticRatings(opt)).front());
}

}  // namespace mqmeval
