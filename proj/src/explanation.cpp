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

#include "gee/explanation.hpp"

#include <regex>

#include "gee/utf8.hpp"

namespace gee {

std::string Explanation::sentence() const {
  if (reason.empty()) return edit_desc;
  return edit_desc + " because " + reason;
}

namespace {

struct Block {
  std::string sentence;
  std::optional<std::string> type;
  std::string raw;
};

const std::regex& type_line() {
  static const std::regex re(R"(^[*_\s]*error type[*_\s]*:[*_\s]*(.*?)[*_\s]*$)", std::regex::icase);
  return re;
}

const std::regex& inline_type() {
  static const std::regex re(R"(^(.*\S)\s+[*_]*error type[*_]*\s*:[*_\s]*(.*?)[*_\s]*$)", std::regex::icase);
  return re;
}

bool starts_new(const std::string& line) {
  static const std::regex re(R"(^(\d+[.)]\s|[-*•]\s|the (word|words|phrase|token|tokens)\b))", std::regex::icase);
  return std::regex_search(line, re);
}

std::string strip_marker(const std::string& s) {
  static const std::regex re(R"(^(\d+[.)]|[-*•])\s+)");
  return std::regex_replace(s, re, "", std::regex_constants::format_first_only);
}

bool is_header(const std::string& line) {
  static const std::regex re(R"(^[*_\s]*explanations?[*_\s]*:?[*_\s]*$)", std::regex::icase);
  return std::regex_match(line, re);
}

}  // namespace

ParsedExplanations parse_explanations(std::string_view text) {
  ParsedExplanations out;
  std::vector<Block> blocks;
  bool after_blank = true;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = utf8::trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) {
      after_blank = true;
      continue;
    }
    if (is_header(line)) continue;
    std::smatch m;
    const bool pending = !blocks.empty() && !blocks.back().type;
    if (std::regex_match(line, m, type_line())) {
      if (pending) {
        blocks.back().type = m[1].str();
        blocks.back().raw += "\n" + line;
      } else {
        out.warnings.push_back("error type line without an explanation: " + line);
      }
    } else if (std::regex_match(line, m, inline_type())) {
      blocks.push_back({m[1].str(), m[2].str(), line});
    } else if (pending && !after_blank && !starts_new(line)) {
      blocks.back().sentence += " " + line;
      blocks.back().raw += "\n" + line;
    } else {
      blocks.push_back({line, std::nullopt, line});
    }
    after_blank = false;
  }

  for (auto& b : blocks) {
    Explanation e;
    e.raw = b.raw;
    const auto sentence = strip_marker(b.sentence);
    const auto cut = sentence.find(" because ");
    if (cut == std::string::npos) {
      e.edit_desc = sentence;
      out.warnings.push_back("no 'because' in explanation: " + sentence);
    } else {
      e.edit_desc = utf8::trim(sentence.substr(0, cut));
      e.reason = utf8::trim(sentence.substr(cut + 9));
    }
    if (b.type) {
      e.error_type = *b.type;
    } else {
      out.warnings.push_back("missing error type for: " + sentence);
    }
    out.explanations.push_back(std::move(e));
  }
  return out;
}

std::string format_explanations(const std::vector<Explanation>& explanations) {
  std::string out;
  for (const auto& e : explanations) {
    if (!out.empty()) out += '\n';
    out += e.sentence() + "\nError type: " + e.error_type;
  }
  return out;
}

}  // namespace gee
