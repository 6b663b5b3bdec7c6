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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gee/llm.hpp"
#include "gee/prompt.hpp"
#include "gee/tokenize.hpp"
#include "json.hpp"

namespace gee {

enum class ProviderKind { Offline, Http };

struct StepConfig {
  std::string model_id = "gpt-4";
  double temperature = 0.0;
  double top_p = 1.0;
  std::optional<int> max_tokens;
};

// Settings shared by every subcommand. Loaded from a JSON file; relative
// paths inside it resolve against the file's directory.
struct RunConfig {
  // Unset means each pair is handled in its own language.
  std::optional<Lang> language;
  ProviderKind provider = ProviderKind::Offline;
  HttpProviderConfig http;
  StepConfig extraction;
  StepConfig explanation{"gpt-4", 1.0, 1.0, std::nullopt};
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> extract_template;
  std::optional<std::filesystem::path> explain_template;
  std::optional<std::filesystem::path> run_log;
  std::size_t concurrency = 4;
  std::size_t max_states = 10000;
  int max_attempts = 5;

  // Throws ConfigError on out-of-range values or missing files.
  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitProvider = 3 };

// Everything a command needs besides its own arguments. `provider` replaces
// the one the config would build, which is how tests avoid the network.
struct CliContext {
  RunConfig config;
  std::shared_ptr<Provider> provider;
  std::ostream* out = nullptr;
  std::function<void(std::chrono::milliseconds)> sleep;
};

enum class ExtractMode { Rule, Llm };

// Each command throws gee::Error subclasses; run_cli maps them to exit codes.
void cmd_preprocess(const CliContext& ctx, const std::filesystem::path& input,
                    const std::filesystem::path& output, const std::optional<std::filesystem::path>& stats_out);
void cmd_extract(const CliContext& ctx, const std::filesystem::path& input, const std::filesystem::path& output,
                 ExtractMode mode);
void cmd_explain(const CliContext& ctx, const std::filesystem::path& input, const std::filesystem::path& output);
void cmd_eval_edits(const CliContext& ctx, const std::filesystem::path& predictions,
                    const std::filesystem::path& gold, const std::optional<std::filesystem::path>& adjudications,
                    const std::filesystem::path& report_out);
void cmd_eval_coverage(const CliContext& ctx, const std::optional<std::filesystem::path>& edits,
                       const std::filesystem::path& explanations, const std::filesystem::path& report_out);
void cmd_report(const CliContext& ctx, const std::filesystem::path& annotations,
                const std::optional<std::filesystem::path>& dual_ids, const std::filesystem::path& report_out);

// Parses argv and runs one subcommand. Returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            std::shared_ptr<Provider> provider = nullptr);

}  // namespace gee
