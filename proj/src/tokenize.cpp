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

#include "gee/tokenize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "gee/embedded.hpp"
#include "gee/error.hpp"
#include "gee/utf8.hpp"

namespace gee {

std::string_view to_string(Lang lang) { return lang == Lang::Zh ? "zh" : "de"; }

Lang parse_lang(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "de") return Lang::De;
  if (lower == "zh") return Lang::Zh;
  throw DataError("unknown language tag '" + std::string(text) + "' (expected de or zh)");
}

std::vector<std::string> TokenSeq::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

TokenSeq TokenSeq::from_texts(std::vector<std::string> texts, Lang lang) {
  TokenSeq seq;
  seq.lang = lang;
  seq.has_offsets = false;
  seq.tokens.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    seq.tokens.push_back(Token{std::move(texts[i]), i, 0, 0});
  }
  return seq;
}

std::string_view token_separator(Lang lang) { return lang == Lang::Zh ? "" : " "; }

std::string join_tokens(std::span<const std::string> texts, Lang lang) {
  std::string out;
  const auto sep = token_separator(lang);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i > 0) out += sep;
    out += texts[i];
  }
  return out;
}

std::string join_tokens(const TokenSeq& seq, std::size_t lo, std::size_t hi) {
  std::string out;
  const auto sep = token_separator(seq.lang);
  for (std::size_t i = lo; i < hi; ++i) {
    if (i > lo) out += sep;
    out += seq.tokens[i].text;
  }
  return out;
}

// --- Lexicon ---------------------------------------------------------------

Lexicon::Lexicon(const std::vector<std::string>& words) {
  for (std::size_t i = 0; i < words.size(); ++i) add(words[i], i + 1);
}

void Lexicon::add(std::string word, std::size_t line) {
  if (word.empty()) throw DataError("lexicon entry " + std::to_string(line) + " is empty");
  const auto cps = utf8::decode(word);
  for (char32_t cp : cps) {
    if (utf8::is_space(cp)) {
      throw DataError("lexicon entry " + std::to_string(line) + " contains whitespace: '" +
                      word + "'");
    }
  }
  max_length_ = std::max(max_length_, cps.size());
  words_.insert(std::move(word));
}

Lexicon Lexicon::parse(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto word = utf8::trim(line);
    if (word.empty() || word.front() == '#') continue;
    lex.add(std::move(word), lineno);
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file " + path.string());
  return parse(in);
}

std::shared_ptr<const Lexicon> default_lexicon() {
  static const auto lex = [] {
    for (const auto& t : lexicon_assets()) {
      if (t.name == "zh_default") {
        std::istringstream in{std::string(t.body)};
        return std::make_shared<const Lexicon>(Lexicon::parse(in));
      }
    }
    return std::make_shared<const Lexicon>();
  }();
  return lex;
}

bool Lexicon::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

// --- German ------------------------------------------------------------------

namespace {

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

// "30.04" / "12.3.2012": digits separated by at least one interior dot.
bool is_dotted_number(std::u32string_view core) {
  if (core.empty() || !is_digit(core.front()) || !is_digit(core.back())) return false;
  bool saw_dot = false;
  for (std::size_t i = 0; i < core.size(); ++i) {
    if (core[i] == U'.') {
      if (!is_digit(core[i - 1])) return false;
      saw_dot = true;
    } else if (!is_digit(core[i])) {
      return false;
    }
  }
  return saw_dot;
}

struct Piece {
  std::size_t start;  // code point offset into the chunk
  std::size_t end;
};

// Splits one whitespace-free chunk into pieces.
std::vector<Piece> split_chunk(std::u32string_view chunk, const GermanTokenizerConfig& cfg) {
  auto is_p = [&](char32_t cp) { return cfg.punctuation.find(cp) != std::u32string::npos; };
  auto ellipsis_at = [&](std::size_t pos, std::size_t end) {
    return pos + 3 <= end && chunk[pos] == U'.' && chunk[pos + 1] == U'.' && chunk[pos + 2] == U'.';
  };

  std::vector<Piece> lead;
  std::vector<Piece> trail;
  std::size_t lo = 0;
  std::size_t hi = chunk.size();
  while (lo < hi && is_p(chunk[lo])) {
    if (ellipsis_at(lo, hi)) {
      lead.push_back({lo, lo + 3});
      lo += 3;
    } else {
      lead.push_back({lo, lo + 1});
      ++lo;
    }
  }
  while (hi > lo && is_p(chunk[hi - 1])) {
    if (chunk[hi - 1] == U'.') {
      if (hi - lo >= 3 && chunk[hi - 2] == U'.' && chunk[hi - 3] == U'.') {
        trail.push_back({hi - 3, hi});
        hi -= 3;
        continue;
      }
      const auto core = chunk.substr(lo, hi - 1 - lo);
      const auto with_dot = utf8::encode(chunk.substr(lo, hi - lo));
      if (is_dotted_number(core) || cfg.abbreviations.count(with_dot) > 0) break;
    }
    trail.push_back({hi - 1, hi});
    --hi;
  }
  std::vector<Piece> out = std::move(lead);
  if (hi > lo) out.push_back({lo, hi});
  out.insert(out.end(), trail.rbegin(), trail.rend());
  return out;
}

}  // namespace

TokenSeq tokenize_german(std::string_view text, const GermanTokenizerConfig& cfg) {
  TokenSeq seq;
  seq.original = std::string(text);
  seq.lang = Lang::De;
  const auto cps = utf8::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (utf8::is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !utf8::is_space(cps[j])) ++j;
    const std::u32string_view chunk(cps.data() + i, j - i);
    for (const auto& piece : split_chunk(chunk, cfg)) {
      Token tok;
      tok.text = utf8::encode(chunk.substr(piece.start, piece.end - piece.start));
      tok.index = seq.tokens.size();
      tok.char_start = i + piece.start;
      tok.char_end = i + piece.end;
      seq.tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return seq;
}

// --- Chinese -----------------------------------------------------------------

TokenSeq tokenize_chinese(std::string_view text, const Lexicon& lexicon) {
  TokenSeq seq;
  seq.original = std::string(text);
  seq.lang = Lang::Zh;
  const auto cps = utf8::decode(text);
  auto push = [&](std::size_t lo, std::size_t hi) {
    Token tok;
    tok.text = utf8::encode(std::u32string_view(cps).substr(lo, hi - lo));
    tok.index = seq.tokens.size();
    tok.char_start = lo;
    tok.char_end = hi;
    seq.tokens.push_back(std::move(tok));
  };
  auto wordlike = [](char32_t cp) { return !utf8::is_space(cp) && !utf8::is_punct(cp); };

  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i];
    if (utf8::is_space(cp)) {
      ++i;
      continue;
    }
    if (utf8::is_punct(cp)) {
      push(i, i + 1);
      ++i;
      continue;
    }
    if (utf8::is_ascii_alnum(cp)) {
      std::size_t j = i;
      while (j < cps.size() && utf8::is_ascii_alnum(cps[j])) ++j;
      push(i, j);
      i = j;
      continue;
    }
    std::size_t limit = i;
    while (limit < cps.size() && limit - i < lexicon.max_length() && wordlike(cps[limit])) ++limit;
    std::size_t len = 1;
    for (std::size_t cand = limit - i; cand >= 2; --cand) {
      if (lexicon.contains(utf8::encode(std::u32string_view(cps).substr(i, cand)))) {
        len = cand;
        break;
      }
    }
    push(i, i + len);
    i += len;
  }
  return seq;
}

// --- Detokenize ------------------------------------------------------------

namespace {

bool attaches_left(std::string_view tok) {
  static const std::set<std::string, std::less<>> kLeft = {".", ",", "!", "?", ";", ":", ")",
                                                           "]", "“", "”", "…", "...", "»"};
  return kLeft.count(tok) > 0;
}

bool attaches_right(std::string_view tok) {
  static const std::set<std::string, std::less<>> kRight = {"(", "[", "„", "«"};
  return kRight.count(tok) > 0;
}

}  // namespace

std::string detokenize(const TokenSeq& seq) {
  if (seq.has_offsets) {
    const auto cps = utf8::decode(seq.original);
    const std::u32string_view view(cps);
    std::string out;
    std::size_t pos = 0;
    for (const auto& tok : seq.tokens) {
      if (tok.char_start >= pos && tok.char_start <= cps.size()) {
        out += utf8::encode(view.substr(pos, tok.char_start - pos));
      }
      out += tok.text;
      pos = std::max(pos, tok.char_end);
    }
    if (pos < cps.size()) out += utf8::encode(view.substr(pos));
    return out;
  }
  if (seq.lang == Lang::Zh) {
    std::string out;
    for (const auto& tok : seq.tokens) out += tok.text;
    return out;
  }
  std::string out;
  bool glue_next = true;
  for (const auto& tok : seq.tokens) {
    if (!glue_next && !attaches_left(tok.text)) out += ' ';
    out += tok.text;
    glue_next = attaches_right(tok.text);
  }
  return out;
}

// --- Tokenizer ---------------------------------------------------------------

Tokenizer::Tokenizer(Lang lang, std::shared_ptr<const Lexicon> lexicon,
                     GermanTokenizerConfig german)
    : lang_(lang),
      lexicon_(std::move(lexicon)),
      german_(std::make_shared<const GermanTokenizerConfig>(std::move(german))) {}

TokenSeq Tokenizer::operator()(std::string_view text) const {
  if (lang_ == Lang::Zh) {
    static const Lexicon kEmpty;
    return tokenize_chinese(text, lexicon_ ? *lexicon_ : kEmpty);
  }
  static const GermanTokenizerConfig kDefault;
  return tokenize_german(text, german_ ? *german_ : kDefault);
}

}  // namespace gee
