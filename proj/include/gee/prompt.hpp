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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "gee/atomic.hpp"
#include "gee/corpus.hpp"
#include "gee/diff.hpp"
#include "gee/embedded.hpp"
#include "gee/tokenize.hpp"

namespace gee {

enum class PromptStep { Extract, Explain, BaselineOneShot };

std::string_view to_string(PromptStep step);
PromptStep parse_prompt_step(std::string_view text);

// Placeholders: {src} {trg} {edits}. The bundled texts also spell them
// {original_sentence} {corrected_sentence} {edit}; both forms work.
struct PromptTemplate {
  std::string name;
  std::string body;
  Lang language = Lang::De;
  PromptStep step = PromptStep::Extract;

  // Throws ConfigError naming the first required placeholder that is absent.
  void validate() const;
};

// de/zh extraction and explanation, plus the German one-shot baseline.
// Throws ConfigError for combinations that have no bundled text.
PromptTemplate builtin_template(Lang lang, PromptStep step);
PromptTemplate load_template(const std::filesystem::path& path, Lang lang, PromptStep step);

std::string render_prompt(const PromptTemplate& tmpl, const SentencePair& pair);
// Coarse edits render as tuple lines; used by the extraction step.
std::string render_prompt(const PromptTemplate& tmpl, const SentencePair& pair,
                          std::span<const CoarseEdit> edits);
// Atomic edits render as bracket lines; used by the explanation step.
std::string render_prompt(const PromptTemplate& tmpl, const SentencePair& pair,
                          std::span<const AtomicEdit> edits);

}  // namespace gee
