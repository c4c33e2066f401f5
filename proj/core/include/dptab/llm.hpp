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
//
// Completion backends: an HTTP client speaking the completion-style wire
// protocol ({model, prompt, max_tokens, temperature} -> generated text) plus
// deterministic mocks that make every pipeline testable without a model.

#ifndef DPTAB_LLM_HPP_
#define DPTAB_LLM_HPP_

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "dptab/prompt.hpp"

namespace dptab::llm {

struct BackendConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080"
  std::string model = "local";
  int max_tokens = 16;
  double temperature = 0.0;
  int timeout_ms = 30000;
  int max_concurrency = 4;
  int retries = 2;       // total attempts = retries + 1
  int backoff_ms = 100;  // doubles per retry
  std::string api_key;   // optional bearer token

  void validate() const;
};

struct Completion {
  std::string text;
  double latency_ms = 0.0;
  std::string backend_id;
};

enum class Verdict { kYes, kNo, kUnparsed };

std::string_view verdict_name(Verdict v);

/// Scans the first 16 whitespace/punctuation-delimited tokens for a
/// standalone "yes" or "no" (case-insensitive). Total and deterministic.
Verdict extract_answer(std::string_view completion_text);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual Completion complete(const prompt::Prompt& prompt) = 0;
  virtual std::string id() const = 0;
};

/// Seedless deterministic backend.
///   fixed(a):       returns a for any prompt
///   echo_majority:  returns the majority demonstration answer, ties -> Yes
///   oracle(f):      returns f(prompt); the harness injects a classifier of
///                   the query record via Prompt::query_id
class MockBackend final : public CompletionBackend {
 public:
  using Oracle = std::function<std::string(const prompt::Prompt&)>;

  static std::unique_ptr<MockBackend> fixed(std::string answer);
  static std::unique_ptr<MockBackend> echo_majority();
  static std::unique_ptr<MockBackend> oracle(Oracle fn);

  Completion complete(const prompt::Prompt& prompt) override;
  std::string id() const override { return id_; }

 private:
  MockBackend(std::string id, Oracle fn) : id_(std::move(id)), fn_(std::move(fn)) {}

  std::string id_;
  Oracle fn_;
};

/// HTTP client for completion-style endpoints. Retries transient transport
/// failures and 5xx responses with exponential backoff; bounds in-flight
/// requests with a semaphore. Safe for concurrent use.
class HttpBackend final : public CompletionBackend {
 public:
  explicit HttpBackend(BackendConfig config);
  ~HttpBackend() override;

  Completion complete(const prompt::Prompt& prompt) override;
  std::string id() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dptab::llm

#endif  // DPTAB_LLM_HPP_
