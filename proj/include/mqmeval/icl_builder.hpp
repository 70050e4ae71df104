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

// Construction of per-example demonstration sets.
//
// Specialist bundles pair each test translation with every historical rating
// of the same source from the other systems (hold-one-out). The shuffled and
// fixed-different-source baselines redistribute the same ICL pool while
// keeping per-bundle counts and never showing the test system's outputs.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mqmeval/errors.hpp"
#include "mqmeval/random.hpp"
#include "mqmeval/types.hpp"
#include "mqmeval/utf8.hpp"

namespace mqmeval {

struct BuildOptions {
  Strategy strategy = Strategy::kSpecialist;
  std::uint64_t seed = 0;
  bool filter = false;
  std::optional<std::size_t> subset_size;
  // Empty: the suite's primary round. More than one: merged pool.
  std::vector<RoundId> icl_rounds;
  // Gold round for test translations; defaults to the primary round.
  std::optional<RoundId> eval_round;
  std::optional<Strategy> augment_with;
  bool deduplicate_merged = false;
  int max_retries = 16;
};

// Counters for everything a builder skipped or shortened.
struct BuildLog {
  std::size_t test_holes = 0;
  std::size_t empty_icl = 0;
  std::size_t short_icl = 0;
  std::size_t skipped_bundles = 0;
  std::size_t truncated_subsets = 0;
  std::size_t retries = 0;
  std::vector<std::string> messages;

  void Merge(const BuildLog& other) {
    test_holes += other.test_holes;
    empty_icl += other.empty_icl;
    short_icl += other.short_icl;
    skipped_bundles += other.skipped_bundles;
    truncated_subsets += other.truncated_subsets;
    retries += other.retries;
    messages.insert(messages.end(), other.messages.begin(),
                    other.messages.end());
  }
};

inline std::string BundleKey(const PromptBundle& b) {
  return b.test.source_key.str() + "|" + b.test.system.str();
}

// Adds a round whose cells are the concatenation of the given rounds' cells
// and returns its id. The same translation may appear once per round.
inline RoundId MergeRounds(TestSuite& suite, const std::vector<RoundId>& rounds,
                           bool deduplicate = false) {
  if (rounds.size() < 2) throw RoundError("merging needs at least 2 rounds");
  std::string name = "merged";
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    name += (k == 0 ? ":" : "+") + rounds[k].str();
  }
  const RoundId merged(name);
  std::map<SystemId, std::vector<RatingCell>> pool;
  for (const RoundId& round : rounds) {
    for (const auto& [system, cells] : suite.Round(round)) {
      auto& out = pool[system];
      out.resize(suite.segments.size());
      for (std::size_t i = 0; i < cells.size(); ++i) {
        for (const auto& r : cells[i]) {
          if (deduplicate &&
              std::find(out[i].begin(), out[i].end(), r) != out[i].end()) {
            continue;
          }
          out[i].push_back(r);
        }
      }
    }
  }
  suite.rounds[merged] = std::move(pool);
  return merged;
}

namespace internal {

struct ResolvedRounds {
  const TestSuite* original = nullptr;
  std::optional<TestSuite> merged;  // set only when rounds were merged
  RoundId icl;
  RoundId eval;

  const TestSuite& suite() const { return merged ? *merged : *original; }
};

inline ResolvedRounds ResolveRounds(const TestSuite& suite,
                                    const BuildOptions& opts) {
  ResolvedRounds out;
  out.original = &suite;
  out.eval = opts.eval_round.value_or(suite.PrimaryRound());
  suite.Round(out.eval);
  if (opts.icl_rounds.empty()) {
    out.icl = suite.PrimaryRound();
  } else if (opts.icl_rounds.size() == 1) {
    out.icl = opts.icl_rounds.front();
    suite.Round(out.icl);
  } else {
    out.merged = suite;
    out.icl = MergeRounds(*out.merged, opts.icl_rounds,
                          opts.deduplicate_merged);
  }
  return out;
}

inline void RequireSystem(const TestSuite& suite, const RoundId& round,
                          const SystemId& system) {
  if (!suite.Round(round).contains(system)) {
    throw BuildError("system \"" + system.str() + "\" not rated in round " +
                     round.str());
  }
}

// Specialist bundles with the ICL pool taken from `icl` and tests from
// `eval`.
inline std::vector<PromptBundle> SpecialistBundles(const TestSuite& suite,
                                                   const RoundId& icl,
                                                   const RoundId& eval,
                                                   const SystemId& target,
                                                   BuildLog& log) {
  RequireSystem(suite, eval, target);
  const auto& pool = suite.Round(icl);
  const std::size_t max_icl =
      pool.size() - (pool.contains(target) ? 1 : 0);
  std::vector<PromptBundle> bundles;
  for (std::size_t i = 0; i < suite.segments.size(); ++i) {
    const RatedTranslation* test = suite.Rating(eval, target, i);
    if (test == nullptr) {
      ++log.test_holes;
      continue;
    }
    PromptBundle b;
    b.test = *test;
    b.strategy = Strategy::kSpecialist;
    for (const auto& [system, cells] : pool) {
      if (system == target) continue;
      for (const auto& r : cells[i]) b.icl.push_back(r);
    }
    if (b.icl.empty()) {
      ++log.empty_icl;
      log.messages.push_back("no ICL examples for " + BundleKey(b));
    } else if (b.icl.size() < max_icl) {
      ++log.short_icl;
    }
    bundles.push_back(std::move(b));
  }
  return bundles;
}

}  // namespace internal

// One bundle per rated test segment of `target`; ICL ordered by system id.
inline std::vector<PromptBundle> BuildSpecialist(const TestSuite& suite,
                                                 const SystemId& target,
                                                 const BuildOptions& opts,
                                                 BuildLog* log = nullptr) {
  const auto rounds = internal::ResolveRounds(suite, opts);
  BuildLog local;
  auto bundles = internal::SpecialistBundles(rounds.suite(), rounds.icl,
                                             rounds.eval, target, local);
  if (log) log->Merge(local);
  return bundles;
}

// ICL from `icl_round`, gold tests from `eval_round`.
inline std::vector<PromptBundle> SubstituteIclRound(const TestSuite& suite,
                                                    const SystemId& target,
                                                    const RoundId& icl_round,
                                                    const RoundId& eval_round,
                                                    BuildLog* log = nullptr) {
  BuildOptions opts;
  opts.icl_rounds = {icl_round};
  opts.eval_round = eval_round;
  return BuildSpecialist(suite, target, opts, log);
}

// Shuffled-sources baseline for every system of the gold round at once.
//
// The pool is the multiset union of all systems' specialist ICL lists. Its
// entries are permuted over the same (bundle, slot) grid, so each bundle
// keeps its specialist count. Slots that receive a rating produced by the
// bundle's own test system are repaired by swapping with a compatible slot;
// if that fails the permutation is redrawn with a derived seed.
inline std::map<SystemId, std::vector<PromptBundle>> BuildShuffledAll(
    const TestSuite& suite, const BuildOptions& opts,
    BuildLog* log = nullptr) {
  const auto rounds = internal::ResolveRounds(suite, opts);
  BuildLog local;
  std::map<SystemId, std::vector<PromptBundle>> out;
  struct Slot {
    std::size_t target_index;
    std::size_t bundle;
  };
  std::vector<SystemId> targets = rounds.suite().Systems(rounds.eval);
  std::vector<Slot> slots;
  std::vector<RatedTranslation> pool;
  std::vector<std::vector<PromptBundle>> specialist(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    specialist[t] = internal::SpecialistBundles(rounds.suite(), rounds.icl,
                                                rounds.eval, targets[t], local);
    for (std::size_t b = 0; b < specialist[t].size(); ++b) {
      for (auto& r : specialist[t][b].icl) {
        slots.push_back({t, b});
        pool.push_back(std::move(r));
      }
      specialist[t][b].icl.clear();
    }
  }
  const auto conflicts = [&](std::size_t slot, std::size_t item) {
    return pool[item].system == targets[slots[slot].target_index];
  };

  const std::size_t n = pool.size();
  std::vector<std::size_t> assignment;
  bool satisfied = false;
  for (int attempt = 0; attempt <= opts.max_retries && !satisfied; ++attempt) {
    if (attempt > 0) ++local.retries;
    Rng rng(DeriveSeed(opts.seed, "shuffled#" + std::to_string(attempt)));
    assignment.resize(n);
    std::iota(assignment.begin(), assignment.end(), 0);
    rng.Shuffle(assignment);
    satisfied = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (!conflicts(k, assignment[k])) continue;
      // Scan from a random offset for a slot both items can move into.
      const std::size_t offset = static_cast<std::size_t>(rng.Below(n));
      bool fixed = false;
      for (std::size_t step = 0; step < n; ++step) {
        const std::size_t m = (offset + step) % n;
        if (m == k) continue;
        if (!conflicts(m, assignment[k]) && !conflicts(k, assignment[m])) {
          std::swap(assignment[k], assignment[m]);
          fixed = true;
          break;
        }
      }
      if (!fixed) {
        satisfied = false;
        break;
      }
    }
  }
  if (!satisfied) {
    throw BuildError("shuffled assignment violates the same-system constraint "
                     "after " + std::to_string(opts.max_retries + 1) +
                     " attempts");
  }

  for (std::size_t k = 0; k < n; ++k) {
    specialist[slots[k].target_index][slots[k].bundle].icl.push_back(
        pool[assignment[k]]);
  }
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (auto& b : specialist[t]) {
      b.strategy = Strategy::kShuffled;
      b.seed = opts.seed;
    }
    out[targets[t]] = std::move(specialist[t]);
  }
  if (log) log->Merge(local);
  return out;
}

inline std::vector<PromptBundle> BuildShuffled(const TestSuite& suite,
                                               const SystemId& target,
                                               const BuildOptions& opts,
                                               BuildLog* log = nullptr) {
  const auto rounds = internal::ResolveRounds(suite, opts);
  internal::RequireSystem(rounds.suite(), rounds.eval, target);
  BuildLog local;
  auto all = BuildShuffledAll(suite, opts, &local);
  // Count hole and warning statistics for the requested system only.
  BuildLog target_log;
  internal::SpecialistBundles(rounds.suite(), rounds.icl, rounds.eval, target,
                              target_log);
  target_log.retries = local.retries;
  if (log) log->Merge(target_log);
  return std::move(all[target]);
}

// Fixed-different-source baseline: each bundle's demonstrations all come
// from one other segment (the donor) rated by the same rater as the test
// translation. The donor is drawn per bundle from the seed; only donors
// offering at least the specialist count are eligible.
inline std::vector<PromptBundle> BuildFixedDifferentSource(
    const TestSuite& suite, const SystemId& target, const BuildOptions& opts,
    BuildLog* log = nullptr) {
  const auto rounds = internal::ResolveRounds(suite, opts);
  const TestSuite& s = rounds.suite();
  BuildLog local;
  auto specialist =
      internal::SpecialistBundles(s, rounds.icl, rounds.eval, target, local);
  const auto& pool = s.Round(rounds.icl);

  // Donor material per segment: ratings of systems other than target, and
  // the rater when all of them share one.
  struct Donor {
    std::vector<const RatedTranslation*> ratings;
    std::optional<RaterId> rater;
  };
  std::vector<Donor> donors(s.segments.size());
  for (std::size_t j = 0; j < s.segments.size(); ++j) {
    std::set<RaterId> raters;
    for (const auto& [system, cells] : pool) {
      if (system == target) continue;
      for (const auto& r : cells[j]) {
        donors[j].ratings.push_back(&r);
        raters.insert(r.rater);
      }
    }
    if (raters.size() == 1) donors[j].rater = *raters.begin();
  }

  std::vector<PromptBundle> out;
  for (auto& b : specialist) {
    const std::size_t count = b.icl.size();
    const std::size_t own = *s.SegmentIndex(b.test.source_key);
    std::vector<std::size_t> eligible;
    for (std::size_t j = 0; j < donors.size(); ++j) {
      if (j == own || !donors[j].rater || *donors[j].rater != b.test.rater) {
        continue;
      }
      if (donors[j].ratings.size() >= count && count > 0) eligible.push_back(j);
    }
    if (eligible.empty()) {
      ++local.skipped_bundles;
      local.messages.push_back("BuildError: no same-rater donor segment for " +
                               BundleKey(b));
      continue;
    }
    Rng rng(DeriveSeed(opts.seed, "fixed#" + BundleKey(b)));
    const std::size_t donor =
        eligible[static_cast<std::size_t>(rng.Below(eligible.size()))];
    const auto& material = donors[donor].ratings;
    std::vector<std::size_t> picks(material.size());
    std::iota(picks.begin(), picks.end(), 0);
    if (material.size() > count) {
      rng.Shuffle(picks);
      picks.resize(count);
      std::sort(picks.begin(), picks.end());
    }
    b.icl.clear();
    for (std::size_t p : picks) b.icl.push_back(*material[p]);
    b.strategy = Strategy::kFixedDifferentSource;
    b.seed = opts.seed;
    out.push_back(std::move(b));
  }
  if (log) log->Merge(local);
  return out;
}

// Removes ICL errors whose span text equals a gold span of the test
// translation, and ICL entries whose translation equals the test
// translation. Comparison is on NFC-normalized text.
inline std::vector<PromptBundle> FilterExactMatches(
    std::vector<PromptBundle> bundles) {
  for (auto& b : bundles) {
    const std::string test_target = utf8::Nfc(b.test.target);
    std::set<std::string> gold_spans;
    for (const auto& e : b.test.errors) gold_spans.insert(utf8::Nfc(e.span_text));
    std::vector<RatedTranslation> kept;
    for (auto& r : b.icl) {
      if (utf8::Nfc(r.target) == test_target) continue;
      std::erase_if(r.errors, [&](const ErrorSpan& e) {
        return gold_spans.contains(utf8::Nfc(e.span_text));
      });
      kept.push_back(std::move(r));
    }
    b.icl = std::move(kept);
    b.filter_applied = true;
  }
  return bundles;
}

// Keeps n demonstrations per bundle. Each bundle fixes one seeded
// permutation of its ICL list and keeps its first n entries, so the set for
// n is contained in the set for n + 1. Kept entries retain their original
// relative order.
inline std::vector<PromptBundle> TakeNestedSubset(
    std::vector<PromptBundle> bundles, std::size_t n, std::uint64_t seed,
    BuildLog* log = nullptr) {
  if (n < 1) throw UsageError("subset size must be >= 1");
  for (auto& b : bundles) {
    if (n >= b.icl.size()) {
      if (n > b.icl.size() && log) ++log->truncated_subsets;
      continue;
    }
    std::vector<std::size_t> order(b.icl.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(seed, "subset#" + BundleKey(b)));
    rng.Shuffle(order);
    order.resize(n);
    std::sort(order.begin(), order.end());
    std::vector<RatedTranslation> kept;
    kept.reserve(n);
    for (std::size_t idx : order) kept.push_back(std::move(b.icl[idx]));
    b.icl = std::move(kept);
  }
  return bundles;
}

// Shuffled demonstrations first, then the specialist ones.
inline std::vector<PromptBundle> AugmentWithShuffled(
    std::vector<PromptBundle> specialist,
    const std::vector<PromptBundle>& shuffled) {
  if (shuffled.empty()) return specialist;
  if (shuffled.size() != specialist.size()) {
    throw AlignmentError("bundle lists differ in length: " +
                         std::to_string(specialist.size()) + " vs " +
                         std::to_string(shuffled.size()));
  }
  for (std::size_t k = 0; k < specialist.size(); ++k) {
    auto& b = specialist[k];
    const auto& extra = shuffled[k];
    if (BundleKey(b) != BundleKey(extra)) {
      throw AlignmentError("bundle " + std::to_string(k) + " keys differ: " +
                           BundleKey(b) + " vs " + BundleKey(extra));
    }
    std::vector<RatedTranslation> icl = extra.icl;
    icl.insert(icl.end(), std::make_move_iterator(b.icl.begin()),
               std::make_move_iterator(b.icl.end()));
    b.icl = std::move(icl);
    b.strategy = Strategy::kAugmented;
    b.seed = extra.seed;
  }
  return specialist;
}

// Dispatches on opts.strategy and applies filter / augmentation / subset in
// that order.
inline std::vector<PromptBundle> BuildBundles(const TestSuite& suite,
                                              const SystemId& target,
                                              const BuildOptions& opts,
                                              BuildLog* log = nullptr) {
  std::vector<PromptBundle> bundles;
  switch (opts.strategy) {
    case Strategy::kSpecialist:
    case Strategy::kAugmented:
      bundles = BuildSpecialist(suite, target, opts, log);
      break;
    case Strategy::kShuffled:
      bundles = BuildShuffled(suite, target, opts, log);
      break;
    case Strategy::kFixedDifferentSource:
      bundles = BuildFixedDifferentSource(suite, target, opts, log);
      break;
  }
  const bool augment = opts.strategy == Strategy::kAugmented ||
                       opts.augment_with == Strategy::kShuffled;
  if (augment) {
    BuildOptions shuffled_opts = opts;
    shuffled_opts.strategy = Strategy::kShuffled;
    bundles = AugmentWithShuffled(std::move(bundles),
                                  BuildShuffled(suite, target, shuffled_opts));
  }
  if (opts.filter) bundles = FilterExactMatches(std::move(bundles));
  if (opts.subset_size) {
    bundles = TakeNestedSubset(std::move(bundles), *opts.subset_size,
                               opts.seed, log);
  }
  return bundles;
}

}  // namespace mqmeval
