// Copyright 2026 The GEE Toolkit Authors
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

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gee/atomic.hpp"
#include "gee/corpus.hpp"
#include "gee/explanation.hpp"
#include "gee/prompt.hpp"
#include "gee/tokenize.hpp"

namespace gee {

struct CompletionRequest {
  std::string model_id;
  double temperature = 0.0;
  double top_p = 1.0;
  std::string prompt;
  std::optional<int> max_tokens;

  // Throws ConfigError unless temperature >= 0 and top_p in (0, 1].
  void validate() const;
};

// status is the HTTP status, or 0 when the request never got a reply.
struct CompletionResponse {
  int status = 200;
  std::string text;
  std::string error;
};

// Text in, text out. Implementations must be safe to call concurrently.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual CompletionResponse send(const CompletionRequest& request) = 0;
};

// OpenAI-style chat completions endpoint. The credential is read from the
// environment at construction.
struct HttpProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string credential_env = "OPENAI_API_KEY";
  std::chrono::seconds timeout{120};
};

class HttpProvider : public Provider {
 public:
  // Throws ConfigError when the endpoint is malformed or the variable unset.
  explicit HttpProvider(HttpProviderConfig cfg);
  CompletionResponse send(const CompletionRequest& request) override;

 private:
  HttpProviderConfig cfg_;
  std::string scheme_host_port_;
  std::string path_;
  std::string credential_;
};

// Replies through a callback and counts calls. Used for tests and transcripts.
class ScriptedProvider : public Provider {
 public:
  using Script = std::function<CompletionResponse(const CompletionRequest&, std::size_t call)>;
  explicit ScriptedProvider(Script script) : script_(std::move(script)) {}
  // Replays `replies` in order; the last one repeats.
  static std::shared_ptr<ScriptedProvider> sequence(std::vector<CompletionResponse> replies);

  CompletionResponse send(const CompletionRequest& request) override;
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  Script script_;
  std::atomic<std::size_t> calls_{0};
};

// Deterministic stand-in that needs no network: extraction prompts are
// answered by the rule-based extractor and explanation prompts with fixed
// sentences per operation. Counts calls.
class OfflineProvider : public Provider {
 public:
  explicit OfflineProvider(std::shared_ptr<const Lexicon> lexicon = nullptr) : lexicon_(std::move(lexicon)) {}
  CompletionResponse send(const CompletionRequest& request) override;
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::shared_ptr<const Lexicon> lexicon_;
  std::atomic<std::size_t> calls_{0};
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
  // Defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Retries 429, 5xx and transport failures with exponential backoff. 401/403
// raise ConfigError at once; other statuses raise ProviderError at once.
std::string complete(const CompletionRequest& request, Provider& provider, const RetryPolicy& retry = {});

std::string sha256_hex(std::string_view data);

// Content address of a request: SHA-256 of its canonical JSON.
std::string cache_key(const CompletionRequest& request);

// One JSON file per key under `dir`. Writers to the same key are serialized
// and files are replaced atomically.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  // Corrupt entries count as misses and raise a warning.
  std::optional<std::string> get(const CompletionRequest& request) const;
  void put(const CompletionRequest& request, const std::string& reply) const;
  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path dir_;
};

std::string cached_complete(const CompletionRequest& request, Provider& provider,
                            const std::filesystem::path& cache_dir, const RetryPolicy& retry = {});

// Appends {pair_id, step, digest, duration_ms} lines. Thread-safe.
class RunLog {
 public:
  RunLog() = default;
  explicit RunLog(const std::filesystem::path& path);
  void record(const std::string& pair_id, std::string_view step, const std::string& digest,
              double duration_ms);

 private:
  std::mutex mu_;
  std::unique_ptr<std::ofstream> out_;
};

// Shared knobs for one pipeline step.
struct StepSettings {
  std::string model_id = "gpt-4";
  double temperature = 0.0;
  double top_p = 1.0;
  std::optional<int> max_tokens;
  std::optional<std::filesystem::path> cache_dir;
  RetryPolicy retry;
  RunLog* log = nullptr;

  static StepSettings extraction() { return {}; }
  static StepSettings explanation() {
    StepSettings s;
    s.temperature = 1.0;
    s.top_p = 1.0;
    return s;
  }
};

// Sends the request through the cache when one is configured and logs it.
std::string run_step(const CompletionRequest& request, Provider& provider, const StepSettings& settings,
                     const std::string& pair_id, std::string_view step);

struct LlmExtraction {
  std::vector<AtomicEdit> edits;
  std::vector<std::string> warnings;
  FeasibilityResult feasibility;
  std::string raw;
};

// Coarse diff, extraction prompt, parse, postprocess, feasibility check.
// Throws DataError with the raw reply when nothing parses.
LlmExtraction extract_edits_llm(const SentencePair& pair, const PromptTemplate& tmpl, Provider& provider,
                                const Tokenizer& tokenizer, const StepSettings& settings = {});

struct ExplainResult {
  std::vector<Explanation> explanations;
  std::vector<std::string> warnings;
  std::string raw;
};

// One request for all edits of a pair. No edits means no request. Each
// explanation is linked to an edit through the coverage matcher. Throws
// DataError with the raw reply when no block has a reason or an error type.
ExplainResult explain_edits(const SentencePair& pair, std::span<const AtomicEdit> edits,
                            const PromptTemplate& tmpl, Provider& provider,
                            const StepSettings& settings = StepSettings::explanation());

}  // namespace gee
