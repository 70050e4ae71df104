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

#include "mqmeval/llm_client.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "mqmeval/chat_backend.hpp"
#include "mqmeval/response.hpp"
#include "test_util.hpp"

namespace mqmeval {
namespace {

using testing::Err;
using testing::Rating;
using testing::TempDir;

RenderedPrompt Prompt(const std::string& user) {
  return RenderedPrompt{"system", user, PromptDigest("system", user)};
}

std::vector<EvalRequest> Requests(std::size_t n) {
  std::vector<EvalRequest> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({Prompt("p" + std::to_string(i)), nullptr});
  return out;
}

BatchOptions Fast(std::size_t in_flight = 4) {
  BatchOptions o;
  o.max_in_flight = in_flight;
  o.base_delay = std::chrono::milliseconds(1);
  o.max_delay = std::chrono::milliseconds(5);
  return o;
}

// Echoes the user message after a random delay, tracking concurrency.
class JitterBackend : public EvaluatorBackend {
 public:
  std::string Evaluate(const EvalRequest& r) override {
    const int now = ++in_flight_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::microseconds(
        StableHash(r.prompt.user_message) % 2000));
    --in_flight_;
    ++calls_;
    return "echo:" + r.prompt.user_message;
  }
  std::string Identity() const override { return "jitter"; }
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  std::atomic<int> calls_{0};
};

// Fails transiently `failures` times per prompt, then succeeds.
class FlakyBackend : public EvaluatorBackend {
 public:
  explicit FlakyBackend(int failures, bool transient = true)
      : failures_(failures), transient_(transient) {}
  std::string Evaluate(const EvalRequest& r) override {
    std::lock_guard<std::mutex> lock(mu_);
    if (seen_[r.prompt.user_message]++ < failures_) {
      throw BackendError("scripted failure", transient_);
    }
    return "ok";
  }
  std::string Identity() const override { return "flaky"; }

 private:
  int failures_;
  bool transient_;
  std::mutex mu_;
  std::map<std::string, int> seen_;
};

TEST(EvaluateBatchTest, OrderPreservedUnderJitter) {
  JitterBackend backend;
  const auto reqs = Requests(100);
  const auto out = EvaluateBatch(reqs, backend, Fast(8));
  ASSERT_EQ(out.size(), 100u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], "echo:p" + std::to_string(i));
  EXPECT_LE(backend.peak_.load(), 8);
  EXPECT_EQ(backend.calls_.load(), 100);
}

TEST(EvaluateBatchTest, CachedPromptsMakeNoCalls) {
  TempDir dir("cache");
  const auto reqs = Requests(20);
  {
    JitterBackend backend;
    ResponseCache cache(dir.path());
    const auto r = EvaluateBatchDetailed(reqs, backend, Fast(), &cache);
    EXPECT_EQ(r.backend_calls, 20u);
    EXPECT_EQ(r.cache_hits, 0u);
  }
  JitterBackend backend;
  ResponseCache cache(dir.path());  // fresh process view, disk only
  const auto r = EvaluateBatchDetailed(reqs, backend, Fast(), &cache);
  EXPECT_EQ(backend.calls_.load(), 0);
  EXPECT_EQ(r.backend_calls, 0u);
  EXPECT_EQ(r.cache_hits, 20u);
  EXPECT_EQ(*r.texts[7], "echo:p7");
  for (int a : r.attempts) EXPECT_EQ(a, 0);
}

TEST(EvaluateBatchTest, RetriesTransientFailures) {
  FlakyBackend backend(2);
  const auto r = EvaluateBatchDetailed(Requests(3), backend, Fast());
  ASSERT_TRUE(r.ok());
  for (int a : r.attempts) EXPECT_EQ(a, 3);
  EXPECT_EQ(r.backend_calls, 9u);
}

TEST(EvaluateBatchTest, ExhaustedRetriesReportIndexAndPartial) {
  // Prompt 1 always fails; the others succeed on the first call.
  class OneBad : public EvaluatorBackend {
   public:
    std::string Evaluate(const EvalRequest& r) override {
      if (r.prompt.user_message == "p1") throw BackendError("down", true);
      return "fine";
    }
    std::string Identity() const override { return "onebad"; }
  } backend;
  try {
    EvaluateBatch(Requests(3), backend, Fast());
    FAIL() << "expected BackendError";
  } catch (const BackendError& err) {
    ASSERT_TRUE(err.index().has_value());
    EXPECT_EQ(*err.index(), 1u);
    EXPECT_EQ(err.error_class(), ErrorClass::kBackend);
    ASSERT_EQ(err.partial.size(), 3u);
    EXPECT_EQ(err.partial[0], "fine");
    EXPECT_FALSE(err.partial[1].has_value());
    EXPECT_EQ(err.partial[2], "fine");
  }
  const auto r = EvaluateBatchDetailed(Requests(3), backend, Fast());
  EXPECT_EQ(r.attempts[1], 5);
}

TEST(EvaluateBatchTest, PermanentFailuresAreNotRetried) {
  FlakyBackend backend(1, /*transient=*/false);
  const auto r = EvaluateBatchDetailed(Requests(2), backend, Fast());
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.attempts[0], 1);
  EXPECT_EQ(r.FirstFailure(), 0u);
}

TEST(EvaluateBatchTest, RejectsZeroInFlight) {
  JitterBackend backend;
  EXPECT_THROW(EvaluateBatchDetailed(Requests(1), backend, Fast(0)), UsageError);
}

TEST(CacheKeyTest, Properties) {
  const DecodingParams params;
  const auto p = Prompt("hello");
  EXPECT_EQ(CacheKey("m", p, params), CacheKey("m", p, params));
  EXPECT_EQ(CacheKey("m", p, params).size(), 64u);
  EXPECT_NE(CacheKey("m", p, params), CacheKey("m", Prompt("hellp"), params));
  EXPECT_NE(CacheKey("m", p, params), CacheKey("n", p, params));
  DecodingParams warm;
  warm.temperature = 0.7;
  EXPECT_NE(CacheKey("m", p, params), CacheKey("m", p, warm));
  // Field boundaries are unambiguous.
  EXPECT_NE(CacheKey("ab", Prompt("c"), params), CacheKey("a", Prompt("bc"), params));
}

PromptBundle ParrotBundle() {
  const std::string t1 = "we drove from the country";
  const std::string t2 = "we walked to the city";
  const std::string test = "we had to leave the country";
  PromptBundle b;
  b.icl.push_back(Rating("sysA", "r1", 1, t1,
                         {Err(t1, "we"), Err(t1, "the country", Severity::kMajor)}));
  b.icl.push_back(Rating("sysB", "r1", 1, t2, {Err(t2, "we"), Err(t2, "the city")}));
  b.test = Rating("sysC", "r1", 1, test);
  return b;
}

TEST(ParrotTest, CopiesMatchingIclSpansOnce) {
  const PromptBundle b = ParrotBundle();
  const auto parsed = ParseAutoMqmResponse(ParrotResponse(b), b.test.target);
  ASSERT_EQ(parsed.errors.size(), 2u);
  EXPECT_EQ(parsed.errors[0].span_text, "we");
  EXPECT_EQ(parsed.errors[1].span_text, "the country");
  EXPECT_EQ(parsed.errors[1].severity, Severity::kMajor);
  EXPECT_EQ(parsed.stats.dropped_unalignable, 0u);
}

TEST(ParrotTest, NoIclErrorsGivesEmptyArray) {
  PromptBundle b = ParrotBundle();
  for (auto& r : b.icl) r.errors.clear();
  EXPECT_EQ(ParrotResponse(b), "[]");
  b.icl.clear();
  EXPECT_EQ(ParrotResponse(b), "[]");
}

TEST(ParrotTest, BackendNeedsBundle) {
  ParrotBackend parrot;
  EXPECT_EQ(parrot.Identity(), "parrot:v1");
  EXPECT_THROW(parrot.Evaluate({Prompt("x"), nullptr}), BackendError);
  const PromptBundle b = ParrotBundle();
  EXPECT_EQ(parrot.Evaluate({Prompt("x"), &b}), ParrotResponse(b));
}

TEST(ReplayTest, AnswersFromRecordedResponses) {
  TempDir dir("replay");
  const auto reqs = Requests(5);
  {
    JitterBackend recorder;
    ResponseCache cache(dir.path());
    EvaluateBatch(reqs, recorder, Fast(), &cache);
  }
  ReplayBackend replay(dir.path(), "jitter");
  EXPECT_EQ(replay.Identity(), "replay:jitter");
  const auto out = EvaluateBatch(reqs, replay, Fast());
  EXPECT_EQ(out[3], "echo:p3");
  EXPECT_THROW(replay.Evaluate({Prompt("never recorded"), nullptr}), BackendError);
}

TEST(ChatBackendTest, WireFormat) {
  ChatBackendConfig config;
  config.model = "some-model";
  const auto body = nlohmann::json::parse(ChatRequestBody(config, Prompt("u")));
  EXPECT_EQ(body["model"], "some-model");
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][0]["content"], "system");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "u");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["max_tokens"], 4096);

  EXPECT_EQ(ChatResponseText(R"({"choices":[{"message":{"content":"[]"}}]})"), "[]");
  EXPECT_THROW(ChatResponseText("<html>"), BackendError);
  EXPECT_THROW(ChatResponseText(R"({"choices":[]})"), BackendError);

  EXPECT_EQ(SplitBaseUrl("http://localhost:8080/v1/"),
            (std::pair<std::string, std::string>{"http://localhost:8080", "/v1"}));
  EXPECT_EQ(SplitBaseUrl("https://api.example.com"),
            (std::pair<std::string, std::string>{"https://api.example.com", ""}));
}

TEST(ChatBackendTest, TalksToLocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    auth = req.get_header_value("Authorization");
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json reply;
    reply["choices"] = {{{"message", {{"content", "saw " + body["messages"][1]["content"].get<std::string>()}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("MQMEVAL_TEST_TOKEN", "sekrit", 1);
  ChatBackendConfig config;
  config.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  config.model = "m";
  config.token_env = "MQMEVAL_TEST_TOKEN";
  config.timeout = std::chrono::seconds(5);
  ChatCompletionsBackend backend(config);
  const auto r = EvaluateBatchDetailed({{Prompt("hi"), nullptr}}, backend, Fast(1));
  server.stop();
  thread.join();
  ASSERT_TRUE(r.ok()) << r.errors[0];
  EXPECT_EQ(*r.texts[0], "saw hi");
  EXPECT_EQ(r.attempts[0], 2);
  EXPECT_EQ(auth, "Bearer sekrit");
}

}  // namespace
}  // namespace mqmeval
