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

#include "gee/prompt.hpp"

#include <fstream>
#include <sstream>

#include "gee/error.hpp"

namespace gee {

std::string_view to_string(PromptStep step) {
  switch (step) {
    case PromptStep::Extract:
      return "extract";
    case PromptStep::Explain:
      return "explain";
    case PromptStep::BaselineOneShot:
      return "baseline_oneshot";
  }
  return "?";
}

PromptStep parse_prompt_step(std::string_view text) {
  for (auto s : {PromptStep::Extract, PromptStep::Explain, PromptStep::BaselineOneShot}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown prompt step '" + std::string(text) + "'");
}

namespace {

struct Placeholder {
  std::string_view name;
  std::string_view alias;
};

constexpr Placeholder kSrc{"{src}", "{original_sentence}"};
constexpr Placeholder kTrg{"{trg}", "{corrected_sentence}"};
constexpr Placeholder kEdits{"{edits}", "{edit}"};

bool has(const std::string& body, const Placeholder& p) {
  return body.find(p.name) != std::string::npos || body.find(p.alias) != std::string::npos;
}

bool needs_edits(PromptStep step) { return step != PromptStep::BaselineOneShot; }

// Single left-to-right pass so replacement text is never rescanned.
std::string substitute(const PromptTemplate& tmpl, const SentencePair& pair,
                       const std::optional<std::string>& edits) {
  tmpl.validate();
  if (!edits && has(tmpl.body, kEdits)) {
    throw DataError("template '" + tmpl.name + "' needs input for placeholder {edits}");
  }
  const std::string& body = tmpl.body;
  std::string out;
  out.reserve(body.size() + pair.source.size() + pair.target.size() + (edits ? edits->size() : 0));
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      const std::string_view rest(body.data() + i, body.size() - i);
      const std::string* value = nullptr;
      std::size_t width = 0;
      for (const auto& [p, v] : {std::pair{kSrc, &pair.source}, std::pair{kTrg, &pair.target}}) {
        for (auto form : {p.name, p.alias}) {
          if (rest.substr(0, form.size()) == form) {
            value = v;
            width = form.size();
          }
        }
      }
      for (auto form : {kEdits.name, kEdits.alias}) {
        if (edits && rest.substr(0, form.size()) == form) {
          value = &*edits;
          width = form.size();
          break;
        }
      }
      if (value != nullptr) {
        out += *value;
        i += width;
        continue;
      }
    }
    out += body[i++];
  }
  return out;
}

}  // namespace

void PromptTemplate::validate() const {
  if (!has(body, kSrc)) throw ConfigError("template '" + name + "' lacks placeholder {src}");
  if (!has(body, kTrg)) throw ConfigError("template '" + name + "' lacks placeholder {trg}");
  if (needs_edits(step) && !has(body, kEdits)) {
    throw ConfigError("template '" + name + "' lacks placeholder {edits}");
  }
}

PromptTemplate builtin_template(Lang lang, PromptStep step) {
  std::string name = std::string(to_string(lang)) + "_" + std::string(to_string(step));
  for (const auto& a : prompt_assets()) {
    if (a.name == name) return PromptTemplate{name, std::string(a.body), lang, step};
  }
  throw ConfigError("no bundled prompt '" + name + "'");
}

PromptTemplate load_template(const std::filesystem::path& path, Lang lang, PromptStep step) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  PromptTemplate t{path.stem().string(), ss.str(), lang, step};
  t.validate();
  return t;
}

std::string render_prompt(const PromptTemplate& tmpl, const SentencePair& pair) {
  return substitute(tmpl, pair, std::nullopt);
}

std::string render_prompt(const PromptTemplate& tmpl, const SentencePair& pair,
                          std::span<const CoarseEdit> edits) {
  return substitute(tmpl, pair, format_coarse_edits(edits, tmpl.language));
}

std::string render_prompt(const PromptTemplate& tmpl, const SentencePair& pair,
                          std::span<const AtomicEdit> edits) {
  return substitute(tmpl, pair, serialize_edits(edits));
}

}  // namespace gee
