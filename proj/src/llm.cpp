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

#include "gee/llm.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <algorithm>
#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "gee/error.hpp"
#include "gee/eval.hpp"
#include "gee/log.hpp"
#include "gee/utf8.hpp"
#include "json.hpp"

namespace gee {

using nlohmann::json;

void CompletionRequest::validate() const {
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must lie in (0, 1]");
  if (max_tokens && *max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

// --- providers ---------------------------------------------------------------------

HttpProvider::HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {
  const auto scheme_end = cfg_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint needs a scheme: " + cfg_.endpoint);
  const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = cfg_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);
  const char* value = std::getenv(cfg_.credential_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError("credential variable " + cfg_.credential_env + " is not set");
  }
  credential_ = value;
}

CompletionResponse HttpProvider::send(const CompletionRequest& request) {
  json body = {{"model", request.model_id},
               {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", request.temperature},
               {"top_p", request.top_p}};
  if (request.max_tokens) body["max_tokens"] = *request.max_tokens;

  httplib::Client client(scheme_host_port_);
  client.set_bearer_token_auth(credential_);
  client.set_connection_timeout(cfg_.timeout);
  client.set_read_timeout(cfg_.timeout);
  client.set_write_timeout(cfg_.timeout);
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) return {0, "", httplib::to_string(res.error())};
  CompletionResponse out;
  out.status = res->status;
  if (res->status < 200 || res->status >= 300) {
    out.error = res->body.substr(0, 500);
    return out;
  }
  try {
    const auto reply = json::parse(res->body);
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    out.error = std::string("malformed completion body: ") + e.what();
    out.text = res->body;
  }
  return out;
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::sequence(std::vector<CompletionResponse> replies) {
  if (replies.empty()) throw ConfigError("scripted provider needs at least one reply");
  return std::make_shared<ScriptedProvider>(
      [replies = std::move(replies)](const CompletionRequest&, std::size_t call) {
        return replies[std::min(call, replies.size() - 1)];
      });
}

CompletionResponse ScriptedProvider::send(const CompletionRequest& request) {
  const std::size_t call = calls_.fetch_add(1);
  return script_(request, call);
}

namespace {

std::vector<std::string> nonblank_lines(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = utf8::trim(line);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

bool has_han(std::string_view text) {
  const auto cps = utf8::decode(text);
  return std::any_of(cps.begin(), cps.end(), utf8::is_han);
}

std::string offline_explanation(const AtomicEdit& e) {
  const auto q = [](const std::string& s) { return "'" + s + "'"; };
  switch (e.op) {
    case EditOp::Replace:
      return "The word " + q(e.orig) + " is replaced by " + q(e.tgt) + " because " + q(e.tgt) +
             " is the form the corrected sentence requires.\nError type: " +
             (similarity(e.orig, e.tgt) >= 0.5 ? "spelling" : "word choice");
    case EditOp::Insert:
      return "The word " + q(e.tgt) + " is inserted because the sentence is incomplete without it.\n"
             "Error type: missing word";
    case EditOp::Delete:
      return "The word " + q(e.orig) + " is deleted because it is not needed in this sentence.\n"
             "Error type: unnecessary word";
    case EditOp::Relocate:
      return "The word " + q(e.orig) + " is relocated because it is in the wrong position.\n"
             "Error type: word order";
  }
  return {};
}

}  // namespace

CompletionResponse OfflineProvider::send(const CompletionRequest& request) {
  ++calls_;
  static constexpr std::string_view kMarker = "Below is the sentence pair for you to work on.";
  const auto at = request.prompt.rfind(kMarker);
  if (at == std::string::npos) return {400, "", "offline provider cannot read this prompt"};
  auto lines = nonblank_lines(std::string_view(request.prompt).substr(at));
  if (lines.size() < 4) return {400, "", "offline provider cannot read this prompt"};
  const std::string& src = lines[1];
  const std::string& trg = lines[2];
  const Tokenizer tok(has_han(src + trg) ? Lang::Zh : Lang::De, lexicon_);
  const std::string& last = lines.back();

  std::vector<AtomicEdit> edits;
  const auto edits_at = std::find(lines.begin(), lines.end(), "Edits:");
  if (last == "Atomic edits:" || edits_at == lines.end()) {
    edits = extract_rule_based(tok(src), tok(trg));
  } else {
    std::string block;
    for (auto it = edits_at + 1; it != lines.end() - 1; ++it) block += *it + "\n";
    try {
      edits = parse_edit_lines(block).edits;
    } catch (const DataError&) {
      edits = extract_rule_based(tok(src), tok(trg));
    }
  }
  if (last == "Atomic edits:") return {200, edits.empty() ? "[]" : serialize_edits(edits), ""};
  std::string out;
  for (const auto& e : edits) {
    if (!out.empty()) out += '\n';
    out += offline_explanation(e);
  }
  return {200, out, ""};
}

// --- completion with retries ----------------------------------------------------------

std::string complete(const CompletionRequest& request, Provider& provider, const RetryPolicy& retry) {
  request.validate();
  if (retry.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  int last_status = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
    CompletionResponse r;
    try {
      r = provider.send(request);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      r = {0, "", e.what()};
    }
    if (r.status >= 200 && r.status < 300) {
      if (!r.error.empty()) throw ProviderError(r.error, r.status, r.text);
      return r.text;
    }
    if (r.status == 401 || r.status == 403) {
      throw ConfigError("provider rejected the credential (status " + std::to_string(r.status) + ")");
    }
    last_status = r.status;
    last_error = r.error;
    const bool transient = r.status == 0 || r.status == 429 || r.status >= 500;
    if (!transient) {
      throw ProviderError("provider returned status " + std::to_string(r.status) + ": " + r.error, r.status);
    }
    if (attempt < retry.max_attempts) {
      const auto delay = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(retry.base_delay.count()) * std::pow(retry.multiplier, attempt - 1)));
      warn("provider status " + std::to_string(r.status) + ", retrying in " + std::to_string(delay.count()) +
           " ms");
      if (retry.sleep) {
        retry.sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
  }
  throw ProviderError("provider failed after " + std::to_string(retry.max_attempts) +
                          " attempts, last status " + std::to_string(last_status) + ": " + last_error,
                      last_status);
}

// --- cache ----------------------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string cache_key(const CompletionRequest& request) {
  const json j = {{"model_id", request.model_id},
                  {"prompt", request.prompt},
                  {"temperature", request.temperature},
                  {"top_p", request.top_p}};
  return sha256_hex(j.dump());
}

namespace {

std::mutex& key_mutex(const std::string& key) {
  static std::array<std::mutex, 64> stripes;
  return stripes[std::hash<std::string>{}(key) % stripes.size()];
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<std::string> ResponseCache::get(const CompletionRequest& request) const {
  const auto key = cache_key(request);
  const auto path = path_for(key);
  std::lock_guard lock(key_mutex(key));
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const auto j = json::parse(in);
    if (j.at("key").get<std::string>() != key) throw std::runtime_error("key mismatch");
    return j.at("reply").get<std::string>();
  } catch (const std::exception& e) {
    warn("ignoring corrupt cache entry " + path.string() + ": " + e.what());
    return std::nullopt;
  }
}

void ResponseCache::put(const CompletionRequest& request, const std::string& reply) const {
  const auto key = cache_key(request);
  const auto path = path_for(key);
  const json j = {{"key", key},
                  {"model_id", request.model_id},
                  {"temperature", request.temperature},
                  {"top_p", request.top_p},
                  {"prompt", request.prompt},
                  {"reply", reply}};
  std::lock_guard lock(key_mutex(key));
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  auto tmp = path;
  tmp += ".tmp." + tid.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write cache entry " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::string cached_complete(const CompletionRequest& request, Provider& provider,
                            const std::filesystem::path& cache_dir, const RetryPolicy& retry) {
  request.validate();
  const ResponseCache cache(cache_dir);
  if (auto hit = cache.get(request)) return *hit;
  auto text = complete(request, provider, retry);
  cache.put(request, text);
  return text;
}

// --- run log --------------------------------------------------------------------------

RunLog::RunLog(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
  if (!*out_) throw ConfigError("cannot open run log " + path.string());
}

void RunLog::record(const std::string& pair_id, std::string_view step, const std::string& digest,
                    double duration_ms) {
  const json j = {{"pair_id", pair_id},
                  {"step", std::string(step)},
                  {"digest", digest},
                  {"duration_ms", std::round(duration_ms * 1000.0) / 1000.0}};
  std::lock_guard lock(mu_);
  if (out_) *out_ << j.dump() << '\n' << std::flush;
}

// --- pipeline steps -------------------------------------------------------------------

std::string run_step(const CompletionRequest& request, Provider& provider, const StepSettings& settings,
                     const std::string& pair_id, std::string_view step) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string text = settings.cache_dir ? cached_complete(request, provider, *settings.cache_dir, settings.retry)
                                        : complete(request, provider, settings.retry);
  const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
  if (settings.log) settings.log->record(pair_id, step, cache_key(request), dt.count());
  return text;
}

namespace {

CompletionRequest make_request(const StepSettings& s, std::string prompt) {
  CompletionRequest r;
  r.model_id = s.model_id;
  r.temperature = s.temperature;
  r.top_p = s.top_p;
  r.max_tokens = s.max_tokens;
  r.prompt = std::move(prompt);
  return r;
}

}  // namespace

LlmExtraction extract_edits_llm(const SentencePair& pair, const PromptTemplate& tmpl, Provider& provider,
                                const Tokenizer& tokenizer, const StepSettings& settings) {
  const auto src = tokenizer(pair.source);
  const auto tgt = tokenizer(pair.target);
  const auto coarse = coarse_edits(src, tgt);
  LlmExtraction out;
  out.raw = run_step(make_request(settings, render_prompt(tmpl, pair, coarse)), provider, settings, pair.id,
                     "extract");
  ParsedEdits parsed;
  try {
    parsed = parse_edit_lines(out.raw);
  } catch (const DataError& e) {
    throw DataError("pair '" + pair.id + "': " + e.what());
  }
  out.warnings = std::move(parsed.warnings);
  for (auto& e : postprocess(std::move(parsed.edits))) {
    if (auto why = invariant_violation(e)) {
      out.warnings.push_back("dropped edit: " + *why);
      continue;
    }
    out.edits.push_back(std::move(e));
  }
  out.feasibility = apply_edits(src, tgt, out.edits);
  return out;
}

ExplainResult explain_edits(const SentencePair& pair, std::span<const AtomicEdit> edits,
                            const PromptTemplate& tmpl, Provider& provider, const StepSettings& settings) {
  ExplainResult out;
  if (edits.empty()) return out;
  out.raw = run_step(make_request(settings, render_prompt(tmpl, pair, edits)), provider, settings, pair.id,
                     "explain");
  auto parsed = parse_explanations(out.raw);
  const bool readable = std::any_of(parsed.explanations.begin(), parsed.explanations.end(),
                                    [](const Explanation& e) { return !e.reason.empty() || !e.error_type.empty(); });
  if (!readable) {
    throw DataError("pair '" + pair.id + "': no explanation in reply: " + out.raw);
  }
  out.explanations = std::move(parsed.explanations);
  out.warnings = std::move(parsed.warnings);
  const auto cov = coverage(edits, out.explanations, pair);
  for (const auto& [edit, expl] : cov.matched) out.explanations[expl].matched_edit = edit;
  return out;
}

}  // namespace gee
