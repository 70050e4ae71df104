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

// Evaluator backends, the response cache and batched evaluation.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/hash.hpp"
#include "mqmeval/prompt.hpp"
#include "mqmeval/random.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

struct DecodingParams {
  double temperature = 0.0;
  int max_tokens = 4096;

  std::string Canonical() const {
    nlohmann::ordered_json j;
    j["temperature"] = temperature;
    j["max_tokens"] = max_tokens;
    return j.dump();
  }
};

struct EvalRequest {
  RenderedPrompt prompt;
  // Bundle behind the prompt; only oracle backends read it.
  const PromptBundle* bundle = nullptr;
};

// Implementations must be safe to call concurrently.
class EvaluatorBackend {
 public:
  virtual ~EvaluatorBackend() = default;
  virtual std::string Evaluate(const EvalRequest& request) = 0;
  // Backend name and model, e.g. "chat:gpt-4o" or "parrot:v1".
  virtual std::string Identity() const = 0;
  virtual DecodingParams Params() const { return {}; }
};

inline std::string CacheKey(std::string_view backend_identity,
                            const RenderedPrompt& prompt,
                            const DecodingParams& params) {
  return Sha256Hex({backend_identity, prompt.system_message,
                    prompt.user_message, params.Canonical()});
}

// Parrot oracle: predicts every ICL error whose span text occurs in the test
// translation, de-duplicated by (span, severity, category), in ICL order.
inline std::string ParrotResponse(const PromptBundle& bundle) {
  std::set<std::tuple<std::string, Severity, std::string>> seen;
  std::vector<ErrorSpan> predicted;
  for (const auto& r : bundle.icl) {
    for (const auto& e : r.errors) {
      if (bundle.test.target.find(e.span_text) == std::string::npos) continue;
      if (!seen.emplace(e.span_text, e.severity, e.category.str()).second) {
        continue;
      }
      predicted.push_back(e);
    }
  }
  return RenderErrorArray(predicted);
}

class ParrotBackend : public EvaluatorBackend {
 public:
  std::string Evaluate(const EvalRequest& request) override {
    if (request.bundle == nullptr) {
      throw BackendError("parrot backend needs the prompt bundle");
    }
    return ParrotResponse(*request.bundle);
  }
  std::string Identity() const override { return "parrot:v1"; }
};

// Content-addressed response store. On disk each entry is
// <dir>/<key[0:2]>/<key>.json and is never rewritten once present. With an
// empty directory the cache lives in memory only.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir = {}) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  std::optional<std::string> Get(const std::string& key) {
    std::lock_guard<std::mutex> lock(StripeFor(key));
    {
      std::lock_guard<std::mutex> mem(memory_mutex_);
      const auto it = memory_.find(key);
      if (it != memory_.end()) return it->second;
    }
    if (dir_.empty()) return std::nullopt;
    std::ifstream in(PathFor(key), std::ios::binary);
    if (!in) return std::nullopt;
    const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("value") || !j["value"].is_string()) {
      return std::nullopt;
    }
    std::string value = j["value"].get<std::string>();
    std::lock_guard<std::mutex> mem(memory_mutex_);
    memory_.emplace(key, value);
    return value;
  }

  void Put(const std::string& key, const std::string& value,
           const std::string& identity = {}) {
    std::lock_guard<std::mutex> lock(StripeFor(key));
    {
      std::lock_guard<std::mutex> mem(memory_mutex_);
      if (!memory_.emplace(key, value).second) return;
    }
    if (dir_.empty()) return;
    const auto path = PathFor(key);
    if (std::filesystem::exists(path)) return;
    std::filesystem::create_directories(path.parent_path());
    nlohmann::ordered_json j;
    j["key"] = key;
    j["identity"] = identity;
    j["value"] = value;
    j["created_at"] = static_cast<std::int64_t>(std::time(nullptr));
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << j.dump() << '\n';
    }
    std::filesystem::rename(tmp, path);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path PathFor(const std::string& key) const {
    return dir_ / key.substr(0, 2) / (key + ".json");
  }
  std::mutex& StripeFor(const std::string& key) {
    return stripes_[std::hash<std::string>{}(key) % stripes_.size()];
  }

  std::filesystem::path dir_;
  std::array<std::mutex, 64> stripes_;
  std::mutex memory_mutex_;
  std::map<std::string, std::string> memory_;
};

// Answers from responses recorded under another backend's identity; a
// missing entry is a hard error.
class ReplayBackend : public EvaluatorBackend {
 public:
  ReplayBackend(std::filesystem::path dir, std::string recorded_identity,
                DecodingParams params = {})
      : cache_(std::move(dir)),
        recorded_identity_(std::move(recorded_identity)),
        params_(params) {}

  std::string Evaluate(const EvalRequest& request) override {
    const std::string key =
        CacheKey(recorded_identity_, request.prompt, params_);
    auto value = cache_.Get(key);
    if (!value) throw BackendError("no recorded response for key " + key);
    return *value;
  }
  std::string Identity() const override {
    return "replay:" + recorded_identity_;
  }
  DecodingParams Params() const override { return params_; }

 private:
  ResponseCache cache_;
  std::string recorded_identity_;
  DecodingParams params_;
};

struct BatchOptions {
  std::size_t max_in_flight = 4;
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30000};
  std::uint64_t jitter_seed = 0;
};

struct BatchResult {
  std::vector<std::optional<std::string>> texts;
  std::vector<int> attempts;        // backend calls per prompt; 0 on a hit
  std::vector<std::string> errors;  // empty on success
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;

  bool ok() const {
    for (const auto& t : texts) {
      if (!t) return false;
    }
    return true;
  }
  std::optional<std::size_t> FirstFailure() const {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (!texts[i]) return i;
    }
    return std::nullopt;
  }
};

// Evaluates every request with at most `max_in_flight` outstanding backend
// calls. Results keep input order. Transient BackendErrors are retried with
// exponential backoff and jitter; other failures are final for that item.
inline BatchResult EvaluateBatchDetailed(const std::vector<EvalRequest>& requests,
                                         EvaluatorBackend& backend,
                                         const BatchOptions& options,
                                         ResponseCache* cache = nullptr) {
  if (options.max_in_flight < 1) throw UsageError("max_in_flight must be >= 1");
  const std::size_t n = requests.size();
  BatchResult result;
  result.texts.resize(n);
  result.attempts.assign(n, 0);
  result.errors.resize(n);
  const std::string identity = backend.Identity();
  const DecodingParams params = backend.Params();
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> calls{0};
  std::atomic<std::size_t> hits{0};

  const auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const std::string key = CacheKey(identity, requests[i].prompt, params);
      if (cache) {
        if (auto hit = cache->Get(key)) {
          result.texts[i] = std::move(*hit);
          hits.fetch_add(1);
          continue;
        }
      }
      Rng jitter(DeriveSeed(options.jitter_seed, key));
      for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        result.attempts[i] = attempt;
        calls.fetch_add(1);
        try {
          std::string text = backend.Evaluate(requests[i]);
          if (cache) cache->Put(key, text, identity);
          result.texts[i] = std::move(text);
          result.errors[i].clear();
          break;
        } catch (const BackendError& err) {
          result.errors[i] = err.what();
          if (!err.transient() || attempt == options.max_attempts) break;
        } catch (const std::exception& err) {
          result.errors[i] = err.what();
          break;
        }
        const double scale = std::ldexp(1.0, attempt - 1) *
                             (1.0 + static_cast<double>(jitter.Below(1000)) / 1000.0);
        const auto delay = std::min<std::chrono::milliseconds>(
            options.max_delay,
            std::chrono::milliseconds(static_cast<std::int64_t>(
                static_cast<double>(options.base_delay.count()) * scale)));
        std::this_thread::sleep_for(delay);
      }
    }
  };

  const std::size_t workers = std::min(options.max_in_flight, std::max<std::size_t>(n, 1));
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  result.backend_calls = calls.load();
  result.cache_hits = hits.load();
  return result;
}

// As EvaluateBatchDetailed, but all-or-nothing: the lowest failing index is
// reported in a BackendError that also carries the partial results.
inline std::vector<std::string> EvaluateBatch(
    const std::vector<EvalRequest>& requests, EvaluatorBackend& backend,
    const BatchOptions& options, ResponseCache* cache = nullptr) {
  BatchResult r = EvaluateBatchDetailed(requests, backend, options, cache);
  if (const auto failed = r.FirstFailure()) {
    BackendError err(r.errors[*failed], false, failed);
    err.partial = std::move(r.texts);
    throw err;
  }
  std::vector<std::string> out;
  out.reserve(r.texts.size());
  for (auto& t : r.texts) out.push_back(std::move(*t));
  return out;
}

}  // namespace mqmeval
