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

// Prompt rendering for the AutoMQM (error span) and direct assessment
// tasks. Instruction blocks are fixed per template version; the user message
// holds the demonstrations followed by the test example.

#include <map>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/hash.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

enum class Task { kAutoMqm, kDirectAssessment };

inline Task ParseTask(std::string_view s) {
  if (s == "automqm") return Task::kAutoMqm;
  if (s == "da") return Task::kDirectAssessment;
  throw UsageError("unknown task \"" + std::string(s) + "\"");
}

inline std::string_view TaskName(Task t) {
  return t == Task::kAutoMqm ? "automqm" : "da";
}

inline constexpr std::string_view kTemplateVersion = "v1";

// Copies of templates/automqm_system.txt and templates/da_system.txt.
inline constexpr std::string_view kAutoMqmInstructions =
    "You are an annotator for the quality of machine translation. Your task is to\n"
    "identify errors and assess the quality of the translation.\n"
    "Based on the source segment and machine translation surrounded with triple\n"
    "backticks, identify error types in the translation and classify them. The\n"
    "categories of errors are: accuracy (addition, mistranslation, omission,\n"
    "untranslated text), fluency (character encoding, grammar, inconsistency,\n"
    "punctuation, register, spelling), style (awkward), terminology (inappropriate\n"
    "for context, inconsistent use), non-translation, other, or no-error.\n"
    "Each error is classified as one of three categories: critical, major, and\n"
    "minor. Critical errors inhibit comprehension of the text. Major errors disrupt\n"
    "the flow, but what the text is trying to say is still understandable. Minor\n"
    "errors are technically errors, but do not disrupt the flow or hinder\n"
    "comprehension.\n"
    "\n"
    "Make sure your response is a strict and valid json object that could be parsed\n"
    "with json.loads() in python.\n"
    ;

inline constexpr std::string_view kDaInstructions =
    "You are a judge for the quality of machine translation. Based on the\n"
    "source segment, human-generated reference translation, and machine\n"
    "translation surrounded with triple backticks, your task is to assess\n"
    "the quality of the machine translation on a continuous scale from 0 to\n"
    "100. A score of 0 means \"No meaning preserved\", then the scale goes\n"
    "through \"Some meaning preserved\", to \"Most meaning preserved and few\n"
    "grammar mistakes\", up to a score of 100, which means \"Perfect meaning\n"
    "nd grammar\".\n"
    ;

struct RenderedPrompt {
  std::string system_message;
  std::string user_message;
  std::string digest;  // SHA-256 over both messages

  friend bool operator==(const RenderedPrompt&,
                         const RenderedPrompt&) = default;
};

inline std::string PromptDigest(std::string_view system_message,
                                std::string_view user_message) {
  return Sha256Hex({system_message, user_message});
}

inline std::string LanguageName(std::string_view code) {
  static const std::map<std::string, std::string, std::less<>> kNames = {
      {"ar", "Arabic"},    {"cs", "Czech"},     {"de", "German"},
      {"en", "English"},   {"es", "Spanish"},   {"fr", "French"},
      {"he", "Hebrew"},    {"hi", "Hindi"},     {"is", "Icelandic"},
      {"it", "Italian"},   {"ja", "Japanese"},  {"ko", "Korean"},
      {"nl", "Dutch"},     {"pl", "Polish"},    {"pt", "Portuguese"},
      {"ru", "Russian"},   {"tr", "Turkish"},   {"uk", "Ukrainian"},
      {"zh", "Chinese"},
  };
  const auto it = kNames.find(code);
  if (it == kNames.end()) {
    throw ConfigError("no language name for code \"" + std::string(code) +
                      "\"");
  }
  return it->second;
}

// "en-de" -> {"English", "German"}.
inline std::pair<std::string, std::string> LanguageNames(std::string_view lp) {
  const std::size_t dash = lp.find('-');
  if (dash == std::string_view::npos) {
    throw ConfigError("language pair \"" + std::string(lp) +
                      "\" is not of the form src-tgt");
  }
  return {LanguageName(lp.substr(0, dash)), LanguageName(lp.substr(dash + 1))};
}

// JSON array of {span, severity, category}, keys in that order, on one line.
inline std::string RenderErrorArray(const std::vector<ErrorSpan>& errors) {
  std::string out = "[";
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const ErrorSpan& e = errors[k];
    if (k > 0) out += ", ";
    out += "{\"span\": " + nlohmann::json(e.span_text).dump() +
           ", \"severity\": " +
           nlohmann::json(std::string(SeverityName(e.severity))).dump() +
           ", \"category\": " + nlohmann::json(e.category.str()).dump() + "}";
  }
  out += "]";
  return out;
}

// Shortest round-tripping decimal with at least one fractional digit.
inline std::string FormatScore(double score) {
  return nlohmann::json(score).dump();
}

namespace internal {

inline void CheckFencing(const RatedTranslation& r) {
  for (const std::string* text : {&r.source, &r.target}) {
    if (text->find("```") != std::string::npos) {
      throw FencingError("text of " + r.source_key.str() + " / " +
                         r.system.str() + " contains triple backticks");
    }
  }
}

inline void AppendExampleBlock(std::string& out, const std::string& src_lang,
                               const std::string& tgt_lang,
                               const RatedTranslation& r) {
  CheckFencing(r);
  out += src_lang + " source:\n```" + r.source + "```\n";
  out += tgt_lang + " translation:\n```" + r.target + "```\n";
}

}  // namespace internal

inline RenderedPrompt RenderAutoMqm(const PromptBundle& bundle) {
  const auto [src, tgt] = LanguageNames(bundle.test.source_key.lp);
  RenderedPrompt p;
  p.system_message = std::string(kAutoMqmInstructions);
  for (const auto& r : bundle.icl) {
    internal::AppendExampleBlock(p.user_message, src, tgt, r);
    p.user_message += RenderErrorArray(r.errors) + "\n\n";
  }
  internal::AppendExampleBlock(p.user_message, src, tgt, bundle.test);
  p.digest = PromptDigest(p.system_message, p.user_message);
  return p;
}

inline RenderedPrompt RenderDa(const PromptBundle& bundle) {
  const auto [src, tgt] = LanguageNames(bundle.test.source_key.lp);
  RenderedPrompt p;
  p.system_message = std::string(kDaInstructions);
  for (const auto& r : bundle.icl) {
    if (!r.score) {
      throw MissingScoreError("ICL example " + r.source_key.str() + " / " +
                              r.system.str() + " has no score");
    }
    internal::AppendExampleBlock(p.user_message, src, tgt, r);
    p.user_message += "Score: [[" + FormatScore(*r.score) + "]]\n\n";
  }
  internal::AppendExampleBlock(p.user_message, src, tgt, bundle.test);
  p.digest = PromptDigest(p.system_message, p.user_message);
  return p;
}

inline RenderedPrompt Render(const PromptBundle& bundle, Task task) {
  return task == Task::kAutoMqm ? RenderAutoMqm(bundle) : RenderDa(bundle);
}

}  // namespace mqmeval
