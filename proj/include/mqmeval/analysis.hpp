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

// Copy and rater analyses over predictions and their prompt bundles.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mqmeval/acc23.hpp"
#include "mqmeval/char_f1.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/mqm_score.hpp"
#include "mqmeval/predictions.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

namespace internal {

inline std::map<ItemKey, const PromptBundle*> IndexBundles(
    const std::vector<PromptBundle>& bundles) {
  std::map<ItemKey, const PromptBundle*> out;
  for (const auto& b : bundles) out[KeyOf(b)] = &b;
  return out;
}

inline std::set<std::string> IclSpans(const PromptBundle& b) {
  std::set<std::string> spans;
  for (const auto& r : b.icl) {
    for (const auto& e : r.errors) spans.insert(e.span_text);
  }
  return spans;
}

inline const PromptBundle& RequireBundle(
    const std::map<ItemKey, const PromptBundle*>& index, const Prediction& p) {
  const auto it = index.find(KeyOf(p));
  if (it == index.end()) {
    throw AlignmentError("no bundle for prediction " + p.key.str() + " / " +
                         p.system.str());
  }
  return *it->second;
}

}  // namespace internal

// Percentages of predicted errors whose span text (i) equals a gold span of
// the same translation, (ii) equals an ICL error span, (iii) equals, contains
// or is contained in an ICL error span.
struct ExactMatchRates {
  double ground_truth = 0.0;
  double icl = 0.0;
  double icl_sub_super = 0.0;
  std::size_t predicted_errors = 0;
};

inline ExactMatchRates ExactMatchStats(
    const std::vector<Prediction>& predictions,
    const std::vector<PromptBundle>& bundles) {
  const auto index = internal::IndexBundles(bundles);
  std::size_t total = 0, gt = 0, icl = 0, related = 0;
  for (const auto& p : predictions) {
    const PromptBundle& b = internal::RequireBundle(index, p);
    std::set<std::string> gold;
    for (const auto& e : b.test.errors) gold.insert(e.span_text);
    const auto icl_spans = internal::IclSpans(b);
    for (const auto& e : p.errors) {
      ++total;
      gt += gold.contains(e.span_text);
      const bool exact = icl_spans.contains(e.span_text);
      icl += exact;
      bool rel = exact;
      for (auto it = icl_spans.begin(); !rel && it != icl_spans.end(); ++it) {
        rel = it->find(e.span_text) != std::string::npos ||
              e.span_text.find(*it) != std::string::npos;
      }
      related += rel;
    }
  }
  ExactMatchRates out;
  out.predicted_errors = total;
  if (total > 0) {
    const double d = static_cast<double>(total);
    out.ground_truth = 100.0 * static_cast<double>(gt) / d;
    out.icl = 100.0 * static_cast<double>(icl) / d;
    out.icl_sub_super = 100.0 * static_cast<double>(related) / d;
  }
  return out;
}

struct CopyCounts {
  std::size_t a_only_copies = 0;
  std::size_t b_only_copies = 0;
  std::size_t a_only_total = 0;
  std::size_t b_only_total = 0;
};

// Drops predictions shared by A and B (same segment, span, severity and
// category; multiset semantics), then counts, per side, the remaining
// predictions whose span text is an ICL error span of `bundles`.
inline CopyCounts CopyCountComparison(const std::vector<Prediction>& preds_a,
                                      const std::vector<Prediction>& preds_b,
                                      const std::vector<PromptBundle>& bundles) {
  using ErrorKey = std::tuple<std::string, Severity, CategoryPath>;
  const auto index = internal::IndexBundles(bundles);
  std::map<ItemKey, std::multiset<ErrorKey>> a, b;
  for (const auto& p : preds_a) {
    internal::RequireBundle(index, p);
    auto& s = a[KeyOf(p)];
    for (const auto& e : p.errors) s.insert({e.span_text, e.severity, e.category});
  }
  for (const auto& p : preds_b) {
    internal::RequireBundle(index, p);
    auto& s = b[KeyOf(p)];
    for (const auto& e : p.errors) s.insert({e.span_text, e.severity, e.category});
  }
  std::set<ItemKey> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  CopyCounts out;
  for (const auto& key : keys) {
    std::multiset<ErrorKey> sa = a[key];
    std::multiset<ErrorKey> sb = b[key];
    for (const auto& e : a[key]) {
      const auto it = sb.find(e);
      if (it != sb.end()) {
        sb.erase(it);
        sa.erase(sa.find(e));
      }
    }
    const auto spans = internal::IclSpans(*index.at(key));
    for (const auto& e : sa) {
      ++out.a_only_total;
      out.a_only_copies += spans.contains(std::get<0>(e));
    }
    for (const auto& e : sb) {
      ++out.b_only_total;
      out.b_only_copies += spans.contains(std::get<0>(e));
    }
  }
  return out;
}

// Annotations of one rater (or one rater-prompted run), keyed by item.
struct Annotation {
  std::string hypothesis;
  std::vector<ErrorSpan> errors;
};
using AnnotationSet = std::map<ItemKey, Annotation>;

struct RaterMatrix {
  std::vector<RaterId> rows;
  std::vector<RaterId> cols;
  std::vector<std::vector<double>> f1;
};

struct CrossRaterResult {
  RaterMatrix prediction_f1;  // (icl rater i, test rater j)
  RaterMatrix agreement_f1;   // (rater i as prediction, rater j as gold)
};

namespace internal {

inline double AnnotationF1(const AnnotationSet& pred, const AnnotationSet& gold) {
  std::vector<SegmentRow> rows;
  rows.reserve(gold.size());
  for (const auto& [key, g] : gold) {
    const Annotation& p = pred.at(key);
    if (p.hypothesis != g.hypothesis) {
      throw AlignmentError("hypothesis differs for " + key.first.str());
    }
    rows.push_back(ScoreSegment(key.first, key.second, g.hypothesis, g.errors,
                                p.errors));
  }
  return CrossLpPrf1(rows).f1;
}

inline void RequireSameItems(const AnnotationSet& ref, const AnnotationSet& other,
                             const std::string& what) {
  if (ref.size() != other.size() ||
      !std::equal(ref.begin(), ref.end(), other.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw CoverageError(what + " does not cover the same items");
  }
}

}  // namespace internal

// Cell (i, j) scores the run prompted with rater i's demonstrations against
// rater j's gold annotations. Every set must cover the same items.
inline CrossRaterResult CrossRaterMatrix(
    const std::map<RaterId, AnnotationSet>& predictions_by_icl_rater,
    const std::map<RaterId, AnnotationSet>& gold_by_test_rater) {
  if (gold_by_test_rater.empty()) throw CoverageError("no gold raters");
  const AnnotationSet& ref = gold_by_test_rater.begin()->second;
  for (const auto& [r, set] : gold_by_test_rater) {
    internal::RequireSameItems(ref, set, "gold of rater " + r.str());
  }
  for (const auto& [r, set] : predictions_by_icl_rater) {
    internal::RequireSameItems(ref, set, "predictions for rater " + r.str());
  }
  CrossRaterResult out;
  for (const auto& [r, s] : predictions_by_icl_rater) {
    out.prediction_f1.rows.push_back(r);
  }
  for (const auto& [r, s] : gold_by_test_rater) {
    out.prediction_f1.cols.push_back(r);
    out.agreement_f1.rows.push_back(r);
    out.agreement_f1.cols.push_back(r);
  }
  for (const auto& [ri, pred] : predictions_by_icl_rater) {
    std::vector<double> row;
    for (const auto& [rj, gold] : gold_by_test_rater) {
      row.push_back(internal::AnnotationF1(pred, gold));
    }
    out.prediction_f1.f1.push_back(std::move(row));
  }
  for (const auto& [ri, as_pred] : gold_by_test_rater) {
    std::vector<double> row;
    for (const auto& [rj, gold] : gold_by_test_rater) {
      row.push_back(internal::AnnotationF1(as_pred, gold));
    }
    out.agreement_f1.f1.push_back(std::move(row));
  }
  return out;
}

// Acc23 instances grouped by source segment. Gold is the negated MQM
// penalty; the metric is the predicted score when present, else the negated
// MQM penalty of the predicted errors.
inline std::vector<PairwiseInstance> PairwiseInstancesFromPredictions(
    const std::vector<Prediction>& predictions, const GoldIndex& gold,
    const MqmWeights& weights = {}) {
  std::map<SourceKey, PairwiseInstance> groups;
  for (const auto& p : predictions) {
    const RatedTranslation* ref = gold.Find(KeyOf(p), p.dataset);
    if (ref == nullptr) {
      throw AlignmentError("no gold rating for " + p.key.str() + " / " +
                           p.system.str());
    }
    double metric;
    if (p.score) {
      metric = *p.score;
    } else {
      RatedTranslation tmp;
      tmp.errors = p.errors;
      metric = -MqmScore(tmp, weights);
    }
    auto& g = groups[p.key];
    g.group = p.key.str();
    g.items.push_back({p.system, metric, -MqmScore(*ref, weights)});
  }
  std::vector<PairwiseInstance> out;
  for (auto& [k, g] : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace mqmeval
