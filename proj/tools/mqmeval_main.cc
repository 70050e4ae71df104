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

// mqmeval command-line tool. Results go to stdout as JSON; files are only
// written where an --out / --output-dir is given.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 backend error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mqmeval/acc23.hpp"
#include "mqmeval/analysis.hpp"
#include "mqmeval/bundle_io.hpp"
#include "mqmeval/canonical.hpp"
#include "mqmeval/char_f1.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/experiment.hpp"
#include "mqmeval/icl_builder.hpp"
#include "mqmeval/predictions.hpp"
#include "mqmeval/prompt.hpp"
#include "mqmeval/report.hpp"
#include "mqmeval/significance.hpp"
#include "mqmeval/stats.hpp"
#include "mqmeval/synthetic.hpp"
#include "mqmeval/validate.hpp"
#include "mqmeval/wmt_tsv.hpp"

namespace {

using mqmeval::ordered_json;

void Emit(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

ordered_json PrfJson(const mqmeval::Prf1& s) {
  ordered_json j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["f1"] = s.f1;
  return j;
}

std::vector<std::string> SplitComma(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

// "name=value" -> {name, value}.
std::pair<std::string, std::string> SplitAssignment(const std::string& s,
                                                    const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw mqmeval::UsageError(std::string(flag) + " expects NAME=PATH, got \"" +
                              s + "\"");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

mqmeval::GoldIndex LoadGold(const std::vector<std::string>& paths,
                            const std::string& round) {
  std::optional<mqmeval::RoundId> r;
  if (!round.empty()) r = mqmeval::RoundId(round);
  mqmeval::GoldIndex gold;
  for (const auto& p : paths) {
    for (const auto& suite : mqmeval::LoadCanonicalSuites(p)) gold.Add(suite, r);
  }
  return gold;
}

mqmeval::Statistic ParseStatistic(const std::string& s) {
  if (s == "f1") return mqmeval::Statistic::kF1;
  if (s == "precision") return mqmeval::Statistic::kPrecision;
  if (s == "recall") return mqmeval::Statistic::kRecall;
  throw mqmeval::UsageError("unknown statistic \"" + s + "\"");
}

ordered_json RunSummary(const mqmeval::ExperimentConfig& config,
                        const mqmeval::ExperimentRun& run) {
  ordered_json j;
  j["config_digest"] = run.config_digest;
  j["seeds"] = ordered_json::array();
  for (const auto& r : run.seeds) {
    auto s = mqmeval::ReportJson(config, r);
    s.erase("per_system");
    s["backend_calls"] = r.backend_calls;
    s["cache_hits"] = r.cache_hits;
    j["seeds"].push_back(std::move(s));
  }
  return j;
}

int ExitCodeFor(mqmeval::ErrorClass c) {
  switch (c) {
    case mqmeval::ErrorClass::kUsage:
      return 1;
    case mqmeval::ErrorClass::kData:
      return 2;
    case mqmeval::ErrorClass::kBackend:
      return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test-set-specialized LLM evaluation of machine translation"};
  app.require_subcommand(1);
  std::function<void()> action;
  // Set by run and sweep when items failed at the backend; artifacts and
  // the failure manifest are still written.
  int backend_failures = 0;

  // ingest
  std::string tsv_path, ingest_out, ingest_lp, ingest_dataset, ingest_round = "round1";
  auto* ingest = app.add_subcommand("ingest", "Convert a WMT MQM TSV dump to canonical JSONL");
  ingest->add_option("--wmt-tsv", tsv_path, "WMT MQM TSV file")->required();
  ingest->add_option("--lp", ingest_lp, "Language pair, e.g. en-de")->required();
  ingest->add_option("--dataset", ingest_dataset, "Dataset name, e.g. wmt23")->required();
  ingest->add_option("--round", ingest_round, "Round id");
  ingest->add_option("--out", ingest_out, "Canonical output file")->required();
  ingest->callback([&] {
    action = [&] {
      mqmeval::WmtConversionStats stats;
      const auto records = mqmeval::ConvertWmtTsvFile(
          tsv_path, {ingest_lp, ingest_dataset, ingest_round}, &stats);
      // Reassembling checks consistency before anything is written.
      mqmeval::AssembleSuites(records);
      mqmeval::SaveCanonical(ingest_out, records);
      ordered_json j;
      j["rows"] = stats.rows;
      j["records"] = stats.records;
      j["errors"] = stats.errors;
      j["dropped_spanless"] = stats.dropped_spanless;
      Emit(j);
    };
  });

  // validate
  std::string validate_suite, validate_round;
  bool validate_strict = false;
  auto* validate = app.add_subcommand("validate", "Check pseudo-SxS rating and coverage");
  validate->add_option("--suite", validate_suite, "Canonical file")->required();
  validate->add_option("--round", validate_round, "Round id (default: first round)");
  validate->add_flag("--strict", validate_strict, "Exit 2 when the report is not clean");
  validate->callback([&] {
    action = [&] {
      bool ok = true;
      ordered_json out = ordered_json::array();
      for (const auto& suite : mqmeval::LoadCanonicalSuites(validate_suite)) {
        const mqmeval::RoundId round = validate_round.empty()
                                           ? suite.PrimaryRound()
                                           : mqmeval::RoundId(validate_round);
        const auto report = mqmeval::ValidatePseudoSxs(suite, round);
        ok = ok && report.ok();
        ordered_json j;
        j["dataset"] = suite.dataset;
        j["lp"] = suite.lp;
        j["round"] = round.str();
        j["pseudo_sxs_violations"] = ordered_json::array();
        for (const auto& v : report.pseudo_sxs_violations) {
          ordered_json e;
          e["segment"] = v.segment.str();
          e["raters"] = ordered_json::array();
          for (const auto& r : v.raters) e["raters"].push_back(r.str());
          j["pseudo_sxs_violations"].push_back(std::move(e));
        }
        j["coverage_holes"] = ordered_json::array();
        for (const auto& h : report.coverage_holes) {
          ordered_json e;
          e["system"] = h.system.str();
          e["segment"] = h.segment.str();
          j["coverage_holes"].push_back(std::move(e));
        }
        j["ok"] = report.ok();
        out.push_back(std::move(j));
      }
      Emit(out);
      if (validate_strict && !ok) {
        throw mqmeval::ConsistencyError("suite is not fully pseudo-SxS and complete");
      }
    };
  });

  // build
  std::string build_suite, build_system, build_strategy = "specialist", build_out;
  std::string build_icl_rounds, build_eval_round, build_augment;
  std::uint64_t build_seed = 0;
  bool build_filter = false, build_dedup = false;
  std::optional<std::size_t> build_subset;
  auto* build = app.add_subcommand("build", "Build prompt bundles for one system");
  build->add_option("--suite", build_suite, "Canonical file")->required();
  build->add_option("--system", build_system, "Target system")->required();
  build->add_option("--strategy", build_strategy,
                    "specialist | shuffled | fixed-diff | augmented");
  build->add_option("--seed", build_seed, "Seed for randomized strategies");
  build->add_flag("--filter", build_filter, "Drop exact-match ICL examples and spans");
  build->add_option("--subset-n", build_subset, "Keep a nested subset of k ICL examples");
  build->add_option("--icl-round", build_icl_rounds, "ICL round(s), comma separated");
  build->add_option("--eval-round", build_eval_round, "Round providing test items");
  build->add_flag("--dedup-merged", build_dedup, "De-duplicate merged ICL rounds");
  build->add_option("--augment", build_augment, "Append shuffled ICL (value: shuffled)");
  build->add_option("--out", build_out, "Bundle output file")->required();
  build->callback([&] {
    action = [&] {
      const auto suite = mqmeval::LoadCanonical(build_suite);
      mqmeval::BuildOptions opts;
      opts.strategy = mqmeval::ParseStrategy(build_strategy);
      opts.seed = build_seed;
      opts.filter = build_filter;
      opts.subset_size = build_subset;
      opts.deduplicate_merged = build_dedup;
      for (const auto& r : SplitComma(build_icl_rounds)) opts.icl_rounds.emplace_back(r);
      if (!build_eval_round.empty()) opts.eval_round = mqmeval::RoundId(build_eval_round);
      if (!build_augment.empty()) {
        if (build_augment != "shuffled") {
          throw mqmeval::UsageError("--augment supports only \"shuffled\"");
        }
        opts.augment_with = mqmeval::Strategy::kShuffled;
      }
      mqmeval::BuildLog log;
      const auto bundles =
          mqmeval::BuildBundles(suite, mqmeval::SystemId(build_system), opts, &log);
      mqmeval::SaveBundles(build_out, bundles);
      const auto stats = mqmeval::BundleStats(bundles);
      ordered_json j;
      j["bundles"] = bundles.size();
      j["avg_icl_examples"] = stats.avg_icl_examples;
      j["avg_icl_errors"] = stats.avg_icl_errors;
      j["test_holes"] = log.test_holes;
      j["empty_icl"] = log.empty_icl;
      j["short_icl"] = log.short_icl;
      j["skipped_bundles"] = log.skipped_bundles;
      j["truncated_subsets"] = log.truncated_subsets;
      j["messages"] = log.messages;
      Emit(j);
    };
  });

  // stats
  std::string stats_suite, stats_system = "all";
  bool stats_filter = false;
  auto* stats = app.add_subcommand("stats", "Average ICL examples and errors per test item");
  stats->add_option("--suite", stats_suite, "Canonical file")->required();
  stats->add_option("--system", stats_system, "Target system or \"all\"");
  stats->add_flag("--filter", stats_filter, "Apply the exact-match filter first");
  stats->callback([&] {
    action = [&] {
      ordered_json out = ordered_json::array();
      for (const auto& suite : mqmeval::LoadCanonicalSuites(stats_suite)) {
        const auto s = mqmeval::SuiteStats(suite, stats_system, stats_filter);
        ordered_json j;
        j["dataset"] = suite.dataset;
        j["lp"] = suite.lp;
        j["avg_icl_examples"] = s.avg_icl_examples;
        j["avg_icl_errors"] = s.avg_icl_errors;
        j["bundles"] = s.bundles;
        out.push_back(std::move(j));
      }
      Emit(out);
    };
  });

  // render
  std::string render_bundles, render_task = "automqm", render_out;
  auto* render = app.add_subcommand("render", "Render prompts from bundles");
  render->add_option("--bundles", render_bundles, "Bundle file")->required();
  render->add_option("--task", render_task, "automqm | da");
  render->add_option("--out", render_out, "Prompt output file")->required();
  render->callback([&] {
    action = [&] {
      const auto task = mqmeval::ParseTask(render_task);
      const auto bundles = mqmeval::LoadBundles(render_bundles);
      std::ofstream out(render_out, std::ios::binary);
      if (!out) throw mqmeval::ParseError(0, "cannot write " + render_out);
      for (const auto& b : bundles) {
        const auto p = mqmeval::Render(b, task);
        ordered_json j;
        j["lp"] = b.test.source_key.lp;
        j["doc_id"] = b.test.source_key.doc_id;
        j["seg_id"] = b.test.source_key.seg_id;
        j["system"] = b.test.system.str();
        j["system_message"] = p.system_message;
        j["user_message"] = p.user_message;
        j["digest"] = p.digest;
        out << j.dump() << '\n';
      }
      ordered_json j;
      j["prompts"] = bundles.size();
      j["template_version"] = mqmeval::kTemplateVersion;
      Emit(j);
    };
  });

  // run / sweep share config overrides.
  struct ConfigFlags {
    std::string config, output_dir, backend, systems, strategy, cache_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> seeds, max_in_flight;
  };
  const auto add_config_flags = [](CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
    cmd->add_option("--output-dir", f.output_dir, "Override output_dir");
    cmd->add_option("--backend", f.backend, "Override backend type");
    cmd->add_option("--systems", f.systems, "Override systems (comma list or all)");
    cmd->add_option("--strategy", f.strategy, "Override strategy");
    cmd->add_option("--cache-dir", f.cache_dir, "Override cache_dir");
    cmd->add_option("--seed", f.seed, "Override seed");
    cmd->add_option("--seeds", f.seeds, "Override number of seeds");
    cmd->add_option("--max-in-flight", f.max_in_flight, "Override max_in_flight");
  };
  const auto load_config = [](const ConfigFlags& f) {
    auto c = mqmeval::LoadConfig(f.config);
    if (!f.output_dir.empty()) c.output_dir = f.output_dir;
    if (!f.cache_dir.empty()) c.cache_dir = f.cache_dir;
    if (!f.backend.empty()) c.backend.type = f.backend;
    if (!f.systems.empty()) {
      c.systems = f.systems == "all" ? std::vector<std::string>{} : SplitComma(f.systems);
    }
    if (!f.strategy.empty()) c.build.strategy = mqmeval::ParseStrategy(f.strategy);
    if (f.seed) c.build.seed = *f.seed;
    if (f.seeds) c.seeds = *f.seeds;
    if (f.max_in_flight) c.max_in_flight = *f.max_in_flight;
    if (c.suite.empty()) throw mqmeval::ConfigError("config has no suite");
    if (c.seeds < 1 || c.max_in_flight < 1) {
      throw mqmeval::ConfigError("seeds and max_in_flight must be >= 1");
    }
    return c;
  };

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "Run an experiment from a config");
  add_config_flags(run, run_flags);
  run->callback([&] {
    action = [&] {
      const auto config = load_config(run_flags);
      const auto result = mqmeval::RunExperiment(config);
      Emit(RunSummary(config, result));
      for (const auto& r : result.seeds) {
        for (const auto& f : r.failures) backend_failures += f.stage == "evaluate";
      }
    };
  });

  ConfigFlags sweep_flags;
  std::string sweep_sizes;
  auto* sweep = app.add_subcommand("sweep", "Sweep nested ICL sizes");
  add_config_flags(sweep, sweep_flags);
  sweep->add_option("--sizes", sweep_sizes, "Sizes, e.g. 1,2,3 or 1-10")->required();
  sweep->callback([&] {
    action = [&] {
      const auto config = load_config(sweep_flags);
      std::vector<std::size_t> sizes;
      for (const auto& part : SplitComma(sweep_sizes)) {
        const auto dash = part.find('-');
        try {
          if (dash == std::string::npos) {
            sizes.push_back(std::stoul(part));
          } else {
            const auto lo = std::stoul(part.substr(0, dash));
            const auto hi = std::stoul(part.substr(dash + 1));
            for (auto k = lo; k <= hi; ++k) sizes.push_back(k);
          }
        } catch (const std::logic_error&) {
          throw mqmeval::UsageError("bad --sizes entry \"" + part + "\"");
        }
      }
      const auto result = mqmeval::SweepIclSizes(config, sizes);
      backend_failures += static_cast<int>(result.evaluate_failures);
      ordered_json j;
      j["nested"] = result.nested;
      j["rows"] = ordered_json::array();
      for (const auto& row : result.rows) {
        auto r = PrfJson(row.scores);
        r["n"] = row.n;
        j["rows"].push_back(std::move(r));
      }
      Emit(j);
    };
  });

  // score
  std::vector<std::string> score_gold;
  std::string score_pred, score_round, score_agg = "micro";
  bool score_per_system = false;
  auto* score = app.add_subcommand("score", "Character-level P/R/F1 of predictions");
  score->add_option("--gold", score_gold, "Canonical gold file(s)")->required();
  score->add_option("--pred", score_pred, "Prediction file")->required();
  score->add_option("--round", score_round, "Gold round (default: first round)");
  score->add_option("--aggregation", score_agg, "micro | macro");
  score->add_flag("--per-system", score_per_system, "Add a per-system breakdown");
  score->callback([&] {
    action = [&] {
      const auto agg = mqmeval::ParseAggregation(score_agg);
      const auto gold = LoadGold(score_gold, score_round);
      const auto preds = mqmeval::LoadPredictions(score_pred, gold);
      const auto rows = mqmeval::ScorePredictions(preds, gold);
      ordered_json j;
      j["aggregation"] = score_agg;
      j["items"] = rows.size();
      j["overall"] = PrfJson(mqmeval::CrossLpPrf1(rows, agg));
      for (const auto& [lp, s] : mqmeval::PerLpPrf1(rows, agg)) j["per_lp"][lp] = PrfJson(s);
      if (score_per_system) {
        for (const auto& [sys, s] : mqmeval::PerSystemBreakdown(rows, agg)) {
          j["per_system"][sys.str()] = PrfJson(s);
        }
      }
      Emit(j);
    };
  });

  // acc23
  std::vector<std::string> acc_gold;
  std::string acc_pred, acc_round;
  auto* acc23 = app.add_subcommand("acc23", "Pairwise accuracy with tie calibration");
  acc23->add_option("--gold", acc_gold, "Canonical gold file(s)")->required();
  acc23->add_option("--pred", acc_pred, "Prediction file")->required();
  acc23->add_option("--round", acc_round, "Gold round (default: first round)");
  acc23->callback([&] {
    action = [&] {
      const auto gold = LoadGold(acc_gold, acc_round);
      const auto preds = mqmeval::LoadPredictions(acc_pred, gold);
      const auto r = mqmeval::Acc23(mqmeval::PairwiseInstancesFromPredictions(preds, gold));
      ordered_json j;
      j["accuracy"] = r.accuracy;
      j["epsilon"] = r.epsilon;
      j["pairs"] = r.pairs;
      Emit(j);
    };
  });

  // significance
  std::vector<std::string> sig_gold;
  std::string sig_a, sig_b, sig_round, sig_stat = "f1";
  std::size_t sig_n = 1000;
  std::uint64_t sig_seed = 0;
  auto* sig = app.add_subcommand("significance", "Paired permutation test of A over B");
  sig->add_option("--pred-a", sig_a, "Prediction file A")->required();
  sig->add_option("--pred-b", sig_b, "Prediction file B")->required();
  sig->add_option("--gold", sig_gold, "Canonical gold file(s)")->required();
  sig->add_option("--round", sig_round, "Gold round (default: first round)");
  sig->add_option("--n", sig_n, "Resamples");
  sig->add_option("--seed", sig_seed, "Seed")->required();
  sig->add_option("--statistic", sig_stat, "f1 | precision | recall");
  sig->callback([&] {
    action = [&] {
      const auto stat = ParseStatistic(sig_stat);
      const auto gold = LoadGold(sig_gold, sig_round);
      const auto a = mqmeval::ScorePredictions(mqmeval::LoadPredictions(sig_a, gold), gold);
      const auto b = mqmeval::ScorePredictions(mqmeval::LoadPredictions(sig_b, gold), gold);
      const auto r = mqmeval::PairedPermutationTest(a, b, sig_n, sig_seed, stat);
      ordered_json j;
      j["statistic"] = sig_stat;
      j["observed_delta"] = r.observed_delta;
      j["p_value"] = r.p_value;
      j["resamples"] = r.resamples;
      Emit(j);
    };
  });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Copy, exact-match and rater analyses");
  analyze->require_subcommand(1);
  std::vector<std::string> an_gold;
  std::string an_round, copies_a, copies_b, copies_bundles, matches_pred, matches_bundles;
  auto* copies = analyze->add_subcommand("copies", "Copied ICL spans unique to A vs B");
  copies->add_option("--gold", an_gold, "Canonical gold file(s)")->required();
  copies->add_option("--round", an_round, "Gold round");
  copies->add_option("--pred-a", copies_a, "Prediction file A")->required();
  copies->add_option("--pred-b", copies_b, "Prediction file B")->required();
  copies->add_option("--bundles", copies_bundles, "Bundles used for the runs")->required();
  copies->callback([&] {
    action = [&] {
      const auto gold = LoadGold(an_gold, an_round);
      const auto r = mqmeval::CopyCountComparison(
          mqmeval::LoadPredictions(copies_a, gold),
          mqmeval::LoadPredictions(copies_b, gold),
          mqmeval::LoadBundles(copies_bundles));
      ordered_json j;
      j["a_only_copies"] = r.a_only_copies;
      j["a_only_total"] = r.a_only_total;
      j["b_only_copies"] = r.b_only_copies;
      j["b_only_total"] = r.b_only_total;
      Emit(j);
    };
  });
  auto* matches = analyze->add_subcommand("matches", "Exact-match rates of predicted spans");
  matches->add_option("--gold", an_gold, "Canonical gold file(s)")->required();
  matches->add_option("--round", an_round, "Gold round");
  matches->add_option("--pred", matches_pred, "Prediction file")->required();
  matches->add_option("--bundles", matches_bundles, "Bundles used for the run")->required();
  matches->callback([&] {
    action = [&] {
      const auto gold = LoadGold(an_gold, an_round);
      const auto r = mqmeval::ExactMatchStats(mqmeval::LoadPredictions(matches_pred, gold),
                                              mqmeval::LoadBundles(matches_bundles));
      ordered_json j;
      j["predicted_errors"] = r.predicted_errors;
      j["ground_truth_pct"] = r.ground_truth;
      j["icl_pct"] = r.icl;
      j["icl_sub_super_pct"] = r.icl_sub_super;
      Emit(j);
    };
  });
  std::vector<std::string> cr_gold, cr_pred;
  auto* crossrater = analyze->add_subcommand(
      "crossrater", "F1 matrix of rater-prompted runs against each rater's gold");
  crossrater->add_option("--gold", cr_gold, "RATER=canonical file (repeatable)")->required();
  crossrater->add_option("--pred", cr_pred, "RATER=prediction file (repeatable)");
  crossrater->add_option("--round", an_round, "Round to read from each gold file");
  crossrater->callback([&] {
    action = [&] {
      std::map<mqmeval::RaterId, mqmeval::AnnotationSet> gold_sets, pred_sets;
      std::map<mqmeval::RaterId, mqmeval::GoldIndex> indexes;
      for (const auto& g : cr_gold) {
        const auto [rater, path] = SplitAssignment(g, "--gold");
        auto index = LoadGold({path}, an_round);
        auto& set = gold_sets[mqmeval::RaterId(rater)];
        for (const auto& d : index.Datasets()) {
          for (const auto& [key, r] : *index.Ratings(d)) set[key] = {r.target, r.errors};
        }
        indexes.emplace(mqmeval::RaterId(rater), std::move(index));
      }
      if (indexes.empty()) throw mqmeval::UsageError("--gold is required");
      for (const auto& p : cr_pred) {
        const auto [rater, path] = SplitAssignment(p, "--pred");
        const auto& index = indexes.begin()->second;
        auto& set = pred_sets[mqmeval::RaterId(rater)];
        for (const auto& pred : mqmeval::LoadPredictions(path, index)) {
          const auto* ref = index.Find(mqmeval::KeyOf(pred), pred.dataset);
          set[mqmeval::KeyOf(pred)] = {ref->target, pred.errors};
        }
      }
      const auto r = mqmeval::CrossRaterMatrix(pred_sets, gold_sets);
      const auto matrix = [](const mqmeval::RaterMatrix& m) {
        ordered_json j;
        j["rows"] = ordered_json::array();
        j["cols"] = ordered_json::array();
        for (const auto& x : m.rows) j["rows"].push_back(x.str());
        for (const auto& x : m.cols) j["cols"].push_back(x.str());
        j["f1"] = m.f1;
        return j;
      };
      ordered_json j;
      j["prediction_f1"] = matrix(r.prediction_f1);
      j["agreement_f1"] = matrix(r.agreement_f1);
      Emit(j);
    };
  });

  // report
  std::vector<std::string> rep_gold, rep_methods;
  std::string rep_round, rep_baseline, rep_out, rep_agg = "micro";
  std::size_t rep_n = 1000;
  std::uint64_t rep_seed = 0;
  auto* report = app.add_subcommand("report", "Table CSVs from prediction dumps");
  report->add_option("--gold", rep_gold, "Canonical gold file(s)")->required();
  report->add_option("--round", rep_round, "Gold round");
  report->add_option("--method", rep_methods,
                     "NAME=pred[,pred...] one file per seed run (repeatable)")
      ->required();
  report->add_option("--baseline", rep_baseline, "Method tested against for '*'");
  report->add_option("--n", rep_n, "Permutation resamples");
  report->add_option("--seed", rep_seed, "Permutation seed");
  report->add_option("--aggregation", rep_agg, "micro | macro");
  report->add_option("--out", rep_out, "Output directory")->required();
  report->callback([&] {
    action = [&] {
      const auto gold = LoadGold(rep_gold, rep_round);
      mqmeval::ReportInputs in;
      in.resamples = rep_n;
      in.seed = rep_seed;
      in.aggregation = mqmeval::ParseAggregation(rep_agg);
      if (!rep_baseline.empty()) in.baseline = rep_baseline;
      for (const auto& m : rep_methods) {
        const auto [name, files] = SplitAssignment(m, "--method");
        mqmeval::MethodRuns runs{name, {}};
        for (const auto& f : SplitComma(files)) {
          runs.runs.push_back(mqmeval::LoadPredictions(f, gold));
        }
        in.methods.push_back(std::move(runs));
      }
      const auto tables = mqmeval::BuildReport(in, gold);
      mqmeval::WriteReport(rep_out, tables);
      std::cout << tables.table1;
    };
  });

  // synth
  mqmeval::SyntheticOptions syn;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic WMT-shaped suite");
  synth->add_option("--out", synth_out, "Canonical output file")->required();
  synth->add_option("--dataset", syn.dataset, "Dataset name");
  synth->add_option("--lp", syn.lp, "Language pair");
  synth->add_option("--systems", syn.systems, "Number of systems");
  synth->add_option("--segments", syn.segments, "Number of segments");
  synth->add_option("--raters", syn.raters, "Number of raters");
  synth->add_option("--rounds", syn.rounds, "Number of rounds");
  synth->add_option("--hole-rate", syn.hole_rate, "Probability of an unrated cell");
  synth->add_option("--seed", syn.seed, "Seed");
  synth->callback([&] {
    action = [&] {
      const auto records = mqmeval::SyntheticRatings(syn);
      mqmeval::SaveCanonical(synth_out, records);
      ordered_json j;
      j["records"] = records.size();
      Emit(j);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (action) action();
    if (backend_failures > 0) {
      std::fprintf(stderr,
                   "mqmeval: %d item(s) failed at the backend; see manifest.json\n",
                   backend_failures);
      return 3;
    }
    return 0;
  } catch (const mqmeval::Error& e) {
    std::fprintf(stderr, "mqmeval: %s\n", e.what());
    return ExitCodeFor(e.error_class());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mqmeval: internal error: %s\n", e.what());
    return 2;
  }
}
