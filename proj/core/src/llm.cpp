// Copyright 2026 The dptab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dptab/llm.hpp"

#include <cctype>
#include <chrono>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dptab/error.hpp"

namespace dptab::llm {

void BackendConfig::validate() const {
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  if (retries < 0) throw ConfigError("retries must be >= 0");
  if (timeout_ms < 1) throw ConfigError("timeout must be positive");
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kYes:
      return "yes";
    case Verdict::kNo:
      return "no";
    case Verdict::kUnparsed:
      return "unparsed";
  }
  return "unparsed";
}

Verdict extract_answer(std::string_view text) {
  constexpr int kTokenLimit = 16;
  int tokens_seen = 0;
  std::size_t i = 0;
  while (i < text.size() && tokens_seen < kTokenLimit) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t begin = i;
    while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    const auto token = text.substr(begin, i - begin);
    if (token.size() == 3 &&
        std::tolower(static_cast<unsigned char>(token[0])) == 'y' &&
        std::tolower(static_cast<unsigned char>(token[1])) == 'e' &&
        std::tolower(static_cast<unsigned char>(token[2])) == 's') {
      return Verdict::kYes;
    }
    if (token.size() == 2 &&
        std::tolower(static_cast<unsigned char>(token[0])) == 'n' &&
        std::tolower(static_cast<unsigned char>(token[1])) == 'o') {
      return Verdict::kNo;
    }
    ++tokens_seen;
  }
  return Verdict::kUnparsed;
}

std::unique_ptr<MockBackend> MockBackend::fixed(std::string answer) {
  return std::unique_ptr<MockBackend>(new MockBackend(
      "mock:fixed(" + answer + ")",
      [answer](const prompt::Prompt&) { return answer; }));
}

std::unique_ptr<MockBackend> MockBackend::echo_majority() {
  return std::unique_ptr<MockBackend>(
      new MockBackend("mock:echo-majority", [](const prompt::Prompt& p) {
        int yes = 0;
        int no = 0;
        for (const auto& demo : p.demonstrations) {
          (demo.answer == "Yes" ? yes : no) += 1;
        }
        return yes >= no ? "Yes" : "No";  // ties -> Yes
      }));
}

std::unique_ptr<MockBackend> MockBackend::oracle(Oracle fn) {
  return std::unique_ptr<MockBackend>(new MockBackend("mock:oracle", std::move(fn)));
}

Completion MockBackend::complete(const prompt::Prompt& prompt) {
  return {fn_(prompt), 0.0, id_};
}

struct HttpBackend::Impl {
  explicit Impl(BackendConfig cfg)
      : config(std::move(cfg)), semaphore(config.max_concurrency) {}

  BackendConfig config;
  std::counting_semaphore<> semaphore;
};

HttpBackend::HttpBackend(BackendConfig config) {
  config.validate();
  if (config.endpoint.empty()) throw ConfigError("backend endpoint is empty");
  impl_ = std::make_unique<Impl>(std::move(config));
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::id() const {
  return impl_->config.endpoint + "#" + impl_->config.model;
}

Completion HttpBackend::complete(const prompt::Prompt& prompt) {
  const BackendConfig& cfg = impl_->config;
  nlohmann::json request{{"model", cfg.model},
                         {"prompt", prompt.text()},
                         {"max_tokens", cfg.max_tokens},
                         {"temperature", cfg.temperature}};
  const std::string body = request.dump();

  impl_->semaphore.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{impl_->semaphore};

  const auto start = std::chrono::steady_clock::now();
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(cfg.backoff_ms << (attempt - 1)));
    }
    httplib::Client client(cfg.endpoint);
    client.set_connection_timeout(0, cfg.timeout_ms * 1000);
    client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    if (!cfg.api_key.empty()) client.set_bearer_token_auth(cfg.api_key);

    auto response = client.Post("/v1/completions", body, "application/json");
    if (!response) {
      last_error = "transport failure: " + httplib::to_string(response.error());
      continue;
    }
    if (response->status >= 500) {
      last_error = "server error: status " + std::to_string(response->status);
      continue;
    }
    if (response->status != 200) {
      throw BackendError("backend rejected the request: status " +
                         std::to_string(response->status));
    }

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(response->body);
    } catch (const nlohmann::json::exception&) {
      throw BackendError("malformed backend response: not valid JSON");
    }
    std::string text;
    if (parsed.contains("text") && parsed["text"].is_string()) {
      text = parsed["text"].get<std::string>();
    } else if (parsed.contains("choices") && parsed["choices"].is_array() &&
               !parsed["choices"].empty() && parsed["choices"][0].contains("text")) {
      text = parsed["choices"][0]["text"].get<std::string>();
    } else {
      throw BackendError("malformed backend response: no completion text");
    }

    const auto elapsed = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return {std::move(text), elapsed, id()};
  }
  throw BackendError("backend unreachable after " +
                     std::to_string(cfg.retries + 1) + " attempts (" + last_error +
                     ")");
}

}  // namespace dptab::llm
