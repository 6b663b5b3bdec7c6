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
#include <iosfwd>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gee {

enum class Lang { De, Zh };

std::string_view to_string(Lang lang);
// Accepts "de"/"zh" (case-insensitive). Throws DataError otherwise.
Lang parse_lang(std::string_view text);

struct Token {
  std::string text;
  std::size_t index = 0;
  // Code point offsets into TokenSeq::original, half-open.
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

// A tokenized sentence. When `has_offsets` is false the tokens were built from
// bare strings and `original` is empty; detokenize() then normalizes spacing.
struct TokenSeq {
  std::vector<Token> tokens;
  std::string original;
  Lang lang = Lang::De;
  bool has_offsets = true;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i].text; }
  std::vector<std::string> texts() const;

  static TokenSeq from_texts(std::vector<std::string> texts, Lang lang);
};

// Token separator used when a run of tokens is rendered as edit text.
std::string_view token_separator(Lang lang);
std::string join_tokens(std::span<const std::string> texts, Lang lang);
std::string join_tokens(const TokenSeq& seq, std::size_t lo, std::size_t hi);

// Word list for greedy Chinese segmentation. Immutable once built.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(const std::vector<std::string>& words);

  // One word per line, UTF-8, '#' starts a comment line. Blank lines skipped.
  static Lexicon parse(std::istream& in);
  static Lexicon load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  // Longest entry, in code points.
  std::size_t max_length() const noexcept { return max_length_; }

 private:
  void add(std::string word, std::size_t line);

  std::unordered_set<std::string> words_;
  std::size_t max_length_ = 0;
};

// Small general-purpose word list bundled with the library.
std::shared_ptr<const Lexicon> default_lexicon();

struct GermanTokenizerConfig {
  // Detached when leading or trailing a whitespace-delimited chunk.
  std::u32string punctuation = U".,!?;:\"'„“”‘’()[]«»—…";
  // Keep their trailing period.
  std::set<std::string> abbreviations = {"ca.", "z.B.", "bzw.", "usw.", "Nr.", "Dr."};
};

TokenSeq tokenize_german(std::string_view text, const GermanTokenizerConfig& cfg = {});

// Forward maximum matching against `lexicon`. Punctuation is always its own
// token and runs of ASCII letters/digits stay together.
TokenSeq tokenize_chinese(std::string_view text, const Lexicon& lexicon);

// Exact inverse of tokenization when offsets are retained; otherwise German
// tokens are joined with single spaces and punctuation is re-attached, and
// Chinese tokens are concatenated.
std::string detokenize(const TokenSeq& seq);

// Language-bound tokenizer, cheap to copy and safe to share across threads.
class Tokenizer {
 public:
  Tokenizer() = default;
  explicit Tokenizer(Lang lang, std::shared_ptr<const Lexicon> lexicon = nullptr,
                     GermanTokenizerConfig german = {});

  Lang lang() const noexcept { return lang_; }
  TokenSeq operator()(std::string_view text) const;

 private:
  Lang lang_ = Lang::De;
  std::shared_ptr<const Lexicon> lexicon_;
  std::shared_ptr<const GermanTokenizerConfig> german_;
};

}  // namespace gee
