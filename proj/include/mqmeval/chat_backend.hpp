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

// Generic chat-completions backend:
//   POST {base_url}/chat/completions
//   {"model", "messages": [{"role": "system", ...}, {"role": "user", ...}],
//    "temperature", "max_tokens"}
// with a bearer token read from the environment variable `token_env`.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <chrono>
#include <cstdlib>
#include <string>
#include <utility>

#include "httplib.h"
#include "json.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/llm_client.hpp"

namespace mqmeval {

struct ChatBackendConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string model;
  std::string token_env = "MQMEVAL_API_KEY";
  DecodingParams params;
  std::chrono::seconds timeout{120};
};

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
inline std::pair<std::string, std::string> SplitBaseUrl(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("base_url \"" + url + "\" lacks a scheme");
  }
  const std::size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path), prefix};
}

inline std::string ChatRequestBody(const ChatBackendConfig& config,
                                   const RenderedPrompt& prompt) {
  nlohmann::ordered_json body;
  body["model"] = config.model;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", prompt.system_message}},
       {{"role", "user"}, {"content", prompt.user_message}}});
  body["temperature"] = config.params.temperature;
  body["max_tokens"] = config.params.max_tokens;
  return body.dump();
}

// Extracts choices[0].message.content.
inline std::string ChatResponseText(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw BackendError("response body is not JSON");
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& err) {
    throw BackendError(std::string("unexpected response shape: ") + err.what());
  }
}

class ChatCompletionsBackend : public EvaluatorBackend {
 public:
  explicit ChatCompletionsBackend(ChatBackendConfig config)
      : config_(std::move(config)) {
    std::tie(host_, prefix_) = SplitBaseUrl(config_.base_url);
  }

  std::string Evaluate(const EvalRequest& request) override {
    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (const char* token = std::getenv(config_.token_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    auto res = client.Post(prefix_ + "/chat/completions", headers,
                           ChatRequestBody(config_, request.prompt),
                           "application/json");
    if (!res) {
      throw BackendError("transport failure: " + httplib::to_string(res.error()),
                         /*transient=*/true);
    }
    if (res->status == 429 || res->status >= 500) {
      throw BackendError("HTTP " + std::to_string(res->status),
                         /*transient=*/true);
    }
    if (res->status != 200) {
      throw BackendError("HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 300));
    }
    return ChatResponseText(res->body);
  }

  std::string Identity() const override { return "chat:" + config_.model; }
  DecodingParams Params() const override { return config_.params; }

 private:
  ChatBackendConfig config_;
  std::string host_;
  std::string prefix_;
};

}  // namespace mqmeval
