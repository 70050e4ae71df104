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

// End-to-end experiment runs driven by a JSON config:
//
//   {
//     "suite": "data/wmt23_en-de.jsonl",
//     "systems": "all",                 // or ["sysA", "sysB"]
//     "strategy": "specialist",         // shuffled | fixed-diff | augmented
//     "seed": 0, "seeds": 1,
//     "filter": false, "subset_size": null,
//     "icl_rounds": [], "eval_round": null, "augment": null,
//     "task": "automqm",                // or "da"
//     "backend": {"type": "parrot"},    // replay | chat
//     "max_in_flight": 4, "cache_dir": null,
//     "meta_eval": {"per_system": true, "aggregation": "micro"},
//     "output_dir": "runs/example"
//   }
//
// Artifacts written under output_dir: bundles.jsonl, prompts.jsonl,
// responses.jsonl, predictions.jsonl, report.json, per_system.csv and
// manifest.json. They carry the config digest and nothing time-dependent.
// Cache statistics go to run_stats.json, which is allowed to differ
// between runs.

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqmeval/acc23.hpp"
#include "mqmeval/analysis.hpp"
#include "mqmeval/bundle_io.hpp"
#include "mqmeval/canonical.hpp"
#include "mqmeval/char_f1.hpp"
#include "mqmeval/chat_backend.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/hash.hpp"
#include "mqmeval/icl_builder.hpp"
#include "mqmeval/llm_client.hpp"
#include "mqmeval/predictions.hpp"
#include "mqmeval/prompt.hpp"
#include "mqmeval/report.hpp"
#include "mqmeval/response.hpp"
#include "mqmeval/stats.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

struct BackendSpec {
  std::string type = "parrot";  // parrot | replay | chat
  std::string model;
  std::string base_url;
  std::string token_env = "MQMEVAL_API_KEY";
  std::string replay_dir;
  std::string recorded_identity;
  DecodingParams params;
  int timeout_seconds = 120;
};

struct MetaEvalOptions {
  bool per_system = true;
  Aggregation aggregation = Aggregation::kMicro;
};

struct ExperimentConfig {
  std::string suite;
  std::vector<std::string> systems;  // empty: every system of the eval round
  BuildOptions build;
  std::size_t seeds = 1;
  Task task = Task::kAutoMqm;
  BackendSpec backend;
  std::size_t max_in_flight = 4;
  std::string cache_dir;  // empty: <output_dir>/cache
  MetaEvalOptions meta_eval;
  std::string output_dir;
};

namespace internal {

inline bool IsRandomized(Strategy s) {
  return s == Strategy::kShuffled || s == Strategy::kFixedDifferentSource ||
         s == Strategy::kAugmented;
}

inline std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

template <typename T>
T ConfigValue(const nlohmann::json& j, const char* name, const char* type) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field \"") + name + "\" must be " +
                      type);
  }
}

inline void RejectUnknownKeys(const nlohmann::json& j,
                              const std::set<std::string>& known,
                              const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) {
      throw ConfigError("unknown config field \"" + where + k + "\"");
    }
  }
}

}  // namespace internal

inline BackendSpec BackendSpecFromJson(const nlohmann::json& j) {
  using internal::ConfigValue;
  if (!j.is_object()) throw ConfigError("config field \"backend\" must be an object");
  internal::RejectUnknownKeys(
      j,
      {"type", "model", "base_url", "token_env", "replay_dir",
       "recorded_identity", "temperature", "max_tokens", "timeout_seconds"},
      "backend.");
  BackendSpec b;
  const auto str = [&](const char* name, std::string& out) {
    if (j.contains(name) && !j[name].is_null()) {
      out = ConfigValue<std::string>(j[name], name, "a string");
    }
  };
  str("type", b.type);
  str("model", b.model);
  str("base_url", b.base_url);
  str("token_env", b.token_env);
  str("replay_dir", b.replay_dir);
  str("recorded_identity", b.recorded_identity);
  if (j.contains("temperature")) {
    b.params.temperature = ConfigValue<double>(j["temperature"], "temperature", "a number");
  }
  if (j.contains("max_tokens")) {
    b.params.max_tokens = ConfigValue<int>(j["max_tokens"], "max_tokens", "an integer");
  }
  if (j.contains("timeout_seconds")) {
    b.timeout_seconds =
        ConfigValue<int>(j["timeout_seconds"], "timeout_seconds", "an integer");
  }
  if (b.type != "parrot" && b.type != "replay" && b.type != "chat") {
    throw ConfigError("unknown backend type \"" + b.type + "\"");
  }
  return b;
}

inline ExperimentConfig ConfigFromJson(const nlohmann::json& j) {
  using internal::ConfigValue;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  internal::RejectUnknownKeys(
      j,
      {"suite", "systems", "strategy", "seed", "seeds", "filter",
       "subset_size", "icl_rounds", "eval_round", "augment", "dedup_merged",
       "task", "backend", "max_in_flight", "cache_dir", "meta_eval",
       "output_dir"},
      "");
  ExperimentConfig c;
  const auto has = [&](const char* k) { return j.contains(k) && !j[k].is_null(); };
  if (has("suite")) c.suite = ConfigValue<std::string>(j["suite"], "suite", "a string");
  if (has("systems")) {
    const auto& s = j["systems"];
    if (s.is_string()) {
      if (s.get<std::string>() != "all") {
        throw ConfigError("config field \"systems\" must be \"all\" or a list");
      }
    } else {
      c.systems = ConfigValue<std::vector<std::string>>(s, "systems", "a list of strings");
    }
  }
  try {
    if (has("strategy")) {
      c.build.strategy = ParseStrategy(
          ConfigValue<std::string>(j["strategy"], "strategy", "a string"));
    }
    if (has("task")) {
      c.task = ParseTask(ConfigValue<std::string>(j["task"], "task", "a string"));
    }
    if (has("meta_eval")) {
      const auto& m = j["meta_eval"];
      internal::RejectUnknownKeys(m, {"per_system", "aggregation"}, "meta_eval.");
      if (m.contains("per_system")) {
        c.meta_eval.per_system = ConfigValue<bool>(m["per_system"], "per_system", "a boolean");
      }
      if (m.contains("aggregation")) {
        c.meta_eval.aggregation = ParseAggregation(
            ConfigValue<std::string>(m["aggregation"], "aggregation", "a string"));
      }
    }
    if (has("augment")) {
      const auto a = ConfigValue<std::string>(j["augment"], "augment", "a string");
      if (a != "shuffled") throw ConfigError("augment supports only \"shuffled\"");
      c.build.augment_with = Strategy::kShuffled;
    }
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  if (has("seed")) c.build.seed = ConfigValue<std::uint64_t>(j["seed"], "seed", "an unsigned integer");
  c.seeds = internal::IsRandomized(c.build.strategy) ? 10 : 1;
  if (has("seeds")) c.seeds = ConfigValue<std::size_t>(j["seeds"], "seeds", "an unsigned integer");
  if (c.seeds < 1) throw ConfigError("seeds must be >= 1");
  if (has("filter")) c.build.filter = ConfigValue<bool>(j["filter"], "filter", "a boolean");
  if (has("subset_size")) {
    c.build.subset_size =
        ConfigValue<std::size_t>(j["subset_size"], "subset_size", "an unsigned integer");
  }
  if (has("icl_rounds")) {
    for (const auto& r : ConfigValue<std::vector<std::string>>(
             j["icl_rounds"], "icl_rounds", "a list of strings")) {
      c.build.icl_rounds.emplace_back(r);
    }
  }
  if (has("eval_round")) {
    c.build.eval_round =
        RoundId(ConfigValue<std::string>(j["eval_round"], "eval_round", "a string"));
  }
  if (has("dedup_merged")) {
    c.build.deduplicate_merged =
        ConfigValue<bool>(j["dedup_merged"], "dedup_merged", "a boolean");
  }
  if (has("backend")) c.backend = BackendSpecFromJson(j["backend"]);
  if (has("max_in_flight")) {
    c.max_in_flight =
        ConfigValue<std::size_t>(j["max_in_flight"], "max_in_flight", "an unsigned integer");
  }
  if (c.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (has("cache_dir")) c.cache_dir = ConfigValue<std::string>(j["cache_dir"], "cache_dir", "a string");
  if (has("output_dir")) c.output_dir = ConfigValue<std::string>(j["output_dir"], "output_dir", "a string");
  return c;
}

// Relative suite, cache and output paths are taken relative to the config
// file's directory.
inline ExperimentConfig LoadConfig(const std::string& path) {
  const nlohmann::json j =
      nlohmann::json::parse(internal::ReadFileBytes(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError(path + ": not valid JSON");
  ExperimentConfig c = ConfigFromJson(j);
  const auto base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) {
      p = (base / p).lexically_normal().string();
    }
  };
  resolve(c.suite);
  resolve(c.cache_dir);
  resolve(c.output_dir);
  resolve(c.backend.replay_dir);
  return c;
}

// The config as JSON. Paths are left out when `with_paths` is false, which
// is the form that enters the digest.
inline nlohmann::ordered_json ConfigToJson(const ExperimentConfig& c,
                                           bool with_paths = true) {
  nlohmann::ordered_json j;
  if (with_paths) j["suite"] = c.suite;
  if (c.systems.empty()) {
    j["systems"] = "all";
  } else {
    j["systems"] = c.systems;
  }
  j["strategy"] = StrategyName(c.build.strategy);
  j["seed"] = c.build.seed;
  j["seeds"] = c.seeds;
  j["filter"] = c.build.filter;
  j["subset_size"] = c.build.subset_size ? nlohmann::ordered_json(*c.build.subset_size)
                                         : nlohmann::ordered_json(nullptr);
  j["icl_rounds"] = nlohmann::ordered_json::array();
  for (const auto& r : c.build.icl_rounds) j["icl_rounds"].push_back(r.str());
  j["eval_round"] = c.build.eval_round ? nlohmann::ordered_json(c.build.eval_round->str())
                                       : nlohmann::ordered_json(nullptr);
  j["augment"] = c.build.augment_with ? nlohmann::ordered_json("shuffled")
                                      : nlohmann::ordered_json(nullptr);
  j["dedup_merged"] = c.build.deduplicate_merged;
  j["task"] = TaskName(c.task);
  auto& b = j["backend"];
  b["type"] = c.backend.type;
  b["model"] = c.backend.model;
  if (with_paths) {
    b["base_url"] = c.backend.base_url;
    b["token_env"] = c.backend.token_env;
    b["replay_dir"] = c.backend.replay_dir;
  }
  b["recorded_identity"] = c.backend.recorded_identity;
  b["temperature"] = c.backend.params.temperature;
  b["max_tokens"] = c.backend.params.max_tokens;
  if (with_paths) b["timeout_seconds"] = c.backend.timeout_seconds;
  j["max_in_flight"] = c.max_in_flight;
  if (with_paths) j["cache_dir"] = c.cache_dir;
  j["meta_eval"]["per_system"] = c.meta_eval.per_system;
  j["meta_eval"]["aggregation"] =
      c.meta_eval.aggregation == Aggregation::kMicro ? "micro" : "macro";
  if (with_paths) j["output_dir"] = c.output_dir;
  return j;
}

// Digest over the path-free config, the suite contents and the template
// version. max_in_flight does not affect results and is excluded.
inline std::string ConfigDigest(const ExperimentConfig& c,
                                std::string_view suite_bytes) {
  auto j = ConfigToJson(c, /*with_paths=*/false);
  j.erase("max_in_flight");
  const std::string body = j.dump();
  return Sha256Hex({"mqmeval-config", kTemplateVersion, body,
                    Sha256Hex({suite_bytes})});
}

inline std::unique_ptr<EvaluatorBackend> MakeBackend(const BackendSpec& spec) {
  if (spec.type == "parrot") return std::make_unique<ParrotBackend>();
  if (spec.type == "replay") {
    if (spec.replay_dir.empty() || spec.recorded_identity.empty()) {
      throw ConfigError("replay backend needs replay_dir and recorded_identity");
    }
    return std::make_unique<ReplayBackend>(spec.replay_dir,
                                           spec.recorded_identity, spec.params);
  }
  if (spec.base_url.empty() || spec.model.empty()) {
    throw ConfigError("chat backend needs base_url and model");
  }
  ChatBackendConfig cc;
  cc.base_url = spec.base_url;
  cc.model = spec.model;
  cc.token_env = spec.token_env;
  cc.params = spec.params;
  cc.timeout = std::chrono::seconds(spec.timeout_seconds);
  return std::make_unique<ChatCompletionsBackend>(std::move(cc));
}

struct ItemFailure {
  std::string stage;  // build | audit | render | evaluate | parse | score
  std::string system;
  std::string segment;  // empty for system-level failures
  std::string error;
};

struct ExperimentResult {
  std::string config_digest;
  std::vector<SystemId> systems;
  std::vector<PromptBundle> bundles;
  std::vector<RenderedPrompt> prompts;               // parallel to bundles
  std::vector<std::optional<std::string>> responses;  // parallel to bundles
  std::vector<Prediction> predictions;
  std::vector<ItemFailure> failures;
  BuildLog build_log;
  IclStats icl;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  EvalReport report;
  Prf1 overall;
  std::map<std::string, Prf1> per_lp;
  std::map<SystemId, Prf1> per_system;
  std::optional<Acc23Result> acc23;
};

namespace internal {

inline void WriteText(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << body;
}

inline std::string PrfCsvCell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline nlohmann::ordered_json PrfJson(const Prf1& s) {
  nlohmann::ordered_json j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["f1"] = s.f1;
  return j;
}

}  // namespace internal

inline nlohmann::ordered_json ReportJson(const ExperimentConfig& config,
                                         const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["config_digest"] = r.config_digest;
  j["task"] = TaskName(config.task);
  j["strategy"] = StrategyName(config.build.strategy);
  j["seed"] = config.build.seed;
  j["systems"] = nlohmann::ordered_json::array();
  for (const auto& s : r.systems) j["systems"].push_back(s.str());
  j["items"] = r.bundles.size();
  j["scored"] = r.report.per_segment.size();
  j["failures"] = r.failures.size();
  j["icl"]["avg_examples"] = r.icl.avg_icl_examples;
  j["icl"]["avg_errors"] = r.icl.avg_icl_errors;
  if (config.task == Task::kAutoMqm) {
    j["aggregation"] = config.meta_eval.aggregation == Aggregation::kMicro ? "micro" : "macro";
    j["overall"] = internal::PrfJson(r.overall);
    for (const auto& [lp, s] : r.per_lp) j["per_lp"][lp] = internal::PrfJson(s);
    if (config.meta_eval.per_system) {
      for (const auto& [sys, s] : r.per_system) {
        j["per_system"][sys.str()] = internal::PrfJson(s);
      }
    }
  } else if (r.acc23) {
    j["acc23"]["accuracy"] = r.acc23->accuracy;
    j["acc23"]["epsilon"] = r.acc23->epsilon;
    j["acc23"]["pairs"] = r.acc23->pairs;
  } else {
    j["acc23"] = nullptr;
  }
  return j;
}

inline void WriteArtifacts(const ExperimentConfig& config,
                           const ExperimentResult& r,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string& digest = r.config_digest;
  {
    std::ostringstream out;
    for (const auto& b : r.bundles) {
      auto j = BundleToJson(b);
      j["config_digest"] = digest;
      out << j.dump() << '\n';
    }
    internal::WriteText(dir / "bundles.jsonl", out.str());
  }
  {
    std::ostringstream prompts;
    std::ostringstream responses;
    for (std::size_t i = 0; i < r.bundles.size(); ++i) {
      const auto& key = r.bundles[i].test.source_key;
      nlohmann::ordered_json head;
      head["lp"] = key.lp;
      head["doc_id"] = key.doc_id;
      head["seg_id"] = key.seg_id;
      head["system"] = r.bundles[i].test.system.str();
      if (!r.prompts[i].digest.empty()) {
        auto p = head;
        p["system_message"] = r.prompts[i].system_message;
        p["user_message"] = r.prompts[i].user_message;
        p["digest"] = r.prompts[i].digest;
        p["config_digest"] = digest;
        prompts << p.dump() << '\n';
      }
      auto q = head;
      q["response"] = r.responses[i] ? nlohmann::ordered_json(*r.responses[i])
                                     : nlohmann::ordered_json(nullptr);
      q["config_digest"] = digest;
      responses << q.dump() << '\n';
    }
    internal::WriteText(dir / "prompts.jsonl", prompts.str());
    internal::WriteText(dir / "responses.jsonl", responses.str());
  }
  {
    std::ostringstream out;
    for (const auto& p : r.predictions) {
      auto j = PredictionToJson(p);
      j["config_digest"] = digest;
      out << j.dump() << '\n';
    }
    internal::WriteText(dir / "predictions.jsonl", out.str());
  }
  internal::WriteText(dir / "report.json", ReportJson(config, r).dump(2) + "\n");
  {
    std::string csv = "system,precision,recall,f1,config_digest\n";
    for (const auto& [sys, s] : r.per_system) {
      csv += sys.str() + "," + internal::PrfCsvCell(s.precision) + "," +
             internal::PrfCsvCell(s.recall) + "," + internal::PrfCsvCell(s.f1) +
             "," + digest + "\n";
    }
    internal::WriteText(dir / "per_system.csv", csv);
  }
  {
    nlohmann::ordered_json m;
    m["config_digest"] = digest;
    m["template_version"] = kTemplateVersion;
    m["config"] = ConfigToJson(config, /*with_paths=*/false);
    m["items"] = r.bundles.size();
    m["predictions"] = r.predictions.size();
    auto& log = m["build_log"];
    log["test_holes"] = r.build_log.test_holes;
    log["empty_icl"] = r.build_log.empty_icl;
    log["short_icl"] = r.build_log.short_icl;
    log["skipped_bundles"] = r.build_log.skipped_bundles;
    log["truncated_subsets"] = r.build_log.truncated_subsets;
    log["retries"] = r.build_log.retries;
    log["messages"] = r.build_log.messages;
    m["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : r.failures) {
      nlohmann::ordered_json e;
      e["stage"] = f.stage;
      e["system"] = f.system;
      e["segment"] = f.segment;
      e["error"] = f.error;
      m["failures"].push_back(std::move(e));
    }
    internal::WriteText(dir / "manifest.json", m.dump(2) + "\n");
  }
  {
    nlohmann::ordered_json s;
    s["config_digest"] = digest;
    s["backend_calls"] = r.backend_calls;
    s["cache_hits"] = r.cache_hits;
    internal::WriteText(dir / "run_stats.json", s.dump(2) + "\n");
  }
}

// Runs one seed of the config against an already loaded suite. Stage
// failures are recorded per item; only config problems throw.
inline ExperimentResult RunExperiment(const ExperimentConfig& config,
                                      const TestSuite& suite,
                                      const std::string& config_digest,
                                      EvaluatorBackend* backend_override = nullptr) {
  ExperimentResult r;
  r.config_digest = config_digest;
  const RoundId eval = config.build.eval_round.value_or(suite.PrimaryRound());
  suite.Round(eval);
  if (config.systems.empty()) {
    r.systems = suite.Systems(eval);
  } else {
    for (const auto& s : config.systems) {
      internal::RequireSystem(suite, eval, SystemId(s));
      r.systems.emplace_back(s);
    }
  }

  // Build, then audit hold-one-out.
  for (const SystemId& target : r.systems) {
    std::vector<PromptBundle> bundles;
    try {
      BuildLog log;
      bundles = BuildBundles(suite, target, config.build, &log);
      r.build_log.Merge(log);
    } catch (const Error& e) {
      r.failures.push_back({"build", target.str(), "", e.what()});
      continue;
    }
    for (auto& b : bundles) {
      bool leaked = false;
      for (const auto& ex : b.icl) leaked = leaked || ex.system == target;
      if (leaked) {
        r.failures.push_back({"audit", target.str(), b.test.source_key.str(),
                              "ICL contains the target system's own rating"});
        continue;
      }
      r.bundles.push_back(std::move(b));
    }
  }
  r.icl = BundleStats(r.bundles);

  // Render.
  const std::size_t n = r.bundles.size();
  r.prompts.resize(n);
  r.responses.resize(n);
  std::vector<EvalRequest> requests;
  std::vector<std::size_t> request_item;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      r.prompts[i] = Render(r.bundles[i], config.task);
      requests.push_back({r.prompts[i], &r.bundles[i]});
      request_item.push_back(i);
    } catch (const Error& e) {
      r.failures.push_back({"render", r.bundles[i].test.system.str(),
                            r.bundles[i].test.source_key.str(), e.what()});
    }
  }

  // Evaluate.
  std::unique_ptr<EvaluatorBackend> owned;
  EvaluatorBackend* backend = backend_override;
  if (backend == nullptr) {
    owned = MakeBackend(config.backend);
    backend = owned.get();
  }
  std::filesystem::path cache_dir = config.cache_dir;
  if (cache_dir.empty() && !config.output_dir.empty()) {
    cache_dir = std::filesystem::path(config.output_dir) / "cache";
  }
  ResponseCache cache(cache_dir);
  BatchOptions batch;
  batch.max_in_flight = config.max_in_flight;
  batch.jitter_seed = config.build.seed;
  const BatchResult br = EvaluateBatchDetailed(requests, *backend, batch, &cache);
  r.backend_calls = br.backend_calls;
  r.cache_hits = br.cache_hits;

  // Parse and score.
  GoldIndex gold;
  for (std::size_t k = 0; k < requests.size(); ++k) {
    const std::size_t i = request_item[k];
    const PromptBundle& b = r.bundles[i];
    if (!br.texts[k]) {
      r.failures.push_back({"evaluate", b.test.system.str(),
                            b.test.source_key.str(), br.errors[k]});
      continue;
    }
    r.responses[i] = br.texts[k];
    Prediction p;
    p.dataset = b.test.dataset;
    p.key = b.test.source_key;
    p.system = b.test.system;
    try {
      if (config.task == Task::kAutoMqm) {
        p.errors = ParseAutoMqmResponse(*br.texts[k], b.test.target).errors;
        r.report.per_segment.push_back(ScoreSegment(
            p.key, p.system, b.test.target, b.test.errors, p.errors));
      } else {
        p.score = ParseDaResponse(*br.texts[k]);
        gold.Insert(b.test.dataset, b.test);
      }
    } catch (const Error& e) {
      r.failures.push_back({"parse", b.test.system.str(),
                            b.test.source_key.str(), e.what()});
      continue;
    }
    r.predictions.push_back(std::move(p));
  }

  const Aggregation agg = config.meta_eval.aggregation;
  if (config.task == Task::kAutoMqm) {
    r.overall = CrossLpPrf1(r.report.per_segment, agg);
    r.per_lp = PerLpPrf1(r.report.per_segment, agg);
    r.per_system = PerSystemBreakdown(r.report.per_segment, agg);
    r.report.aggregates["precision"] = r.overall.precision;
    r.report.aggregates["recall"] = r.overall.recall;
    r.report.aggregates["f1"] = r.overall.f1;
  } else {
    try {
      r.acc23 = Acc23(PairwiseInstancesFromPredictions(r.predictions, gold));
      r.report.aggregates["acc23"] = r.acc23->accuracy;
      r.report.aggregates["epsilon"] = r.acc23->epsilon;
    } catch (const Error& e) {
      r.failures.push_back({"score", "", "", e.what()});
    }
  }
  r.report.metadata["config_digest"] = config_digest;
  r.report.metadata["task"] = std::string(TaskName(config.task));
  r.report.metadata["strategy"] = std::string(StrategyName(config.build.strategy));
  r.report.metadata["backend"] = backend->Identity();
  return r;
}

struct ExperimentRun {
  std::string config_digest;
  std::vector<ExperimentResult> seeds;  // one per seed, in seed order
};

inline std::string SeedDirName(std::uint64_t seed) {
  return "seed_" + std::to_string(seed);
}

// Loads the suite and runs every seed. With several seeds each one writes
// into <output_dir>/seed_<s>/ and a seeds.csv summary is added at the top.
inline ExperimentRun RunExperiment(const ExperimentConfig& config,
                                   EvaluatorBackend* backend_override = nullptr) {
  const std::string bytes = internal::ReadFileBytes(config.suite);
  const TestSuite suite = LoadCanonical(config.suite);
  ExperimentRun run;
  run.config_digest = ConfigDigest(config, bytes);
  for (std::size_t s = 0; s < config.seeds; ++s) {
    ExperimentConfig one = config;
    one.build.seed = config.build.seed + s;
    std::filesystem::path dir = config.output_dir;
    if (config.seeds > 1 && !dir.empty()) {
      dir /= SeedDirName(one.build.seed);
      one.output_dir = dir.string();
    }
    if (one.cache_dir.empty() && !config.output_dir.empty()) {
      one.cache_dir = (std::filesystem::path(config.output_dir) / "cache").string();
    }
    ExperimentResult r = RunExperiment(one, suite, run.config_digest, backend_override);
    if (!dir.empty()) WriteArtifacts(one, r, dir);
    run.seeds.push_back(std::move(r));
  }
  if (config.seeds > 1 && !config.output_dir.empty()) {
    std::string csv = "seed,precision,recall,f1,config_digest\n";
    std::vector<double> f1s;
    for (std::size_t s = 0; s < run.seeds.size(); ++s) {
      const Prf1& o = run.seeds[s].overall;
      f1s.push_back(o.f1);
      csv += std::to_string(config.build.seed + s) + "," +
             internal::PrfCsvCell(o.precision) + "," +
             internal::PrfCsvCell(o.recall) + "," + internal::PrfCsvCell(o.f1) +
             "," + run.config_digest + "\n";
    }
    csv += "AVG,,," + internal::PrfCsvCell(internal::Mean(f1s)) + "," +
           run.config_digest + "\n";
    csv += "STDEV,,," + internal::PrfCsvCell(internal::Stdev(f1s)) + "," +
           run.config_digest + "\n";
    internal::WriteText(std::filesystem::path(config.output_dir) / "seeds.csv", csv);
  }
  return run;
}

struct SweepRow {
  std::size_t n = 0;
  Prf1 scores;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool nested = true;  // every bundle's ICL at size n is a subset at n+1
  std::size_t evaluate_failures = 0;
};

// Runs the config once per ICL size with a shared subset seed. Each size
// writes into <output_dir>/n_<k>/; sweep.csv collects the curve.
inline SweepResult SweepIclSizes(const ExperimentConfig& config,
                                 std::vector<std::size_t> sizes,
                                 EvaluatorBackend* backend_override = nullptr) {
  if (config.task != Task::kAutoMqm) {
    throw ConfigError("ICL size sweeps score character F1 and need task automqm");
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (std::size_t n : sizes) {
    if (n < 1) throw UsageError("ICL sizes must be >= 1");
  }
  const std::string bytes = internal::ReadFileBytes(config.suite);
  const TestSuite suite = LoadCanonical(config.suite);
  SweepResult out;
  std::map<ItemKey, std::vector<RatedTranslation>> previous;
  std::vector<std::string> digests;
  for (std::size_t n : sizes) {
    ExperimentConfig one = config;
    one.seeds = 1;
    one.build.subset_size = n;
    std::filesystem::path dir;
    if (!config.output_dir.empty()) {
      dir = std::filesystem::path(config.output_dir) / ("n_" + std::to_string(n));
      one.output_dir = dir.string();
      if (one.cache_dir.empty()) {
        one.cache_dir = (std::filesystem::path(config.output_dir) / "cache").string();
      }
    }
    const std::string digest = ConfigDigest(one, bytes);
    ExperimentResult r = RunExperiment(one, suite, digest, backend_override);
    if (!dir.empty()) WriteArtifacts(one, r, dir);
    std::map<ItemKey, std::vector<RatedTranslation>> current;
    for (const auto& b : r.bundles) current[KeyOf(b)] = b.icl;
    for (const auto& [key, icl] : previous) {
      const auto it = current.find(key);
      if (it == current.end()) continue;
      for (const auto& ex : icl) {
        if (std::find(it->second.begin(), it->second.end(), ex) == it->second.end()) {
          out.nested = false;
        }
      }
    }
    previous = std::move(current);
    for (const auto& f : r.failures) out.evaluate_failures += f.stage == "evaluate";
    out.rows.push_back({n, r.overall});
    digests.push_back(digest);
  }
  if (!config.output_dir.empty()) {
    std::string csv = "n,precision,recall,f1,config_digest\n";
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      const auto& row = out.rows[i];
      csv += std::to_string(row.n) + "," + internal::PrfCsvCell(row.scores.precision) +
             "," + internal::PrfCsvCell(row.scores.recall) + "," +
             internal::PrfCsvCell(row.scores.f1) + "," + digests[i] + "\n";
    }
    internal::WriteText(std::filesystem::path(config.output_dir) / "sweep.csv", csv);
  }
  return out;
}

}  // namespace mqmeval
