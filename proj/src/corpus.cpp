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

#include "gee/corpus.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "gee/error.hpp"
#include "gee/prompt.hpp"
#include "gee/utf8.hpp"

namespace gee {

using nlohmann::json;

std::string_view to_string(Cefr level) {
  static constexpr std::string_view names[] = {"A1", "A2", "B1", "B2", "C1", "C2"};
  return names[static_cast<int>(level)];
}

Cefr parse_cefr(std::string_view text) {
  static constexpr Cefr levels[] = {Cefr::A1, Cefr::A2, Cefr::B1, Cefr::B2, Cefr::C1, Cefr::C2};
  std::string up;
  for (char c : utf8::trim(text)) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Cefr c : levels) {
    if (to_string(c) == up) return c;
  }
  throw DataError("unknown CEFR level '" + std::string(text) + "'");
}

json edits_to_json(std::span<const AtomicEdit> edits) {
  json out = json::array();
  for (const auto& e : edits) out.push_back({std::string(to_string(e.op)), e.orig, e.tgt});
  return out;
}

std::vector<AtomicEdit> edits_from_json(const json& j) {
  if (!j.is_array()) throw DataError("gold_edits must be an array");
  std::vector<AtomicEdit> out;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 3 || !item[0].is_string() || !item[1].is_string() ||
        !item[2].is_string()) {
      throw DataError("gold edit must be [op, orig, tgt]: " + item.dump());
    }
    AtomicEdit e;
    const auto op = item[0].get<std::string>();
    if (op == "insert") {
      e.op = EditOp::Insert;
    } else if (op == "delete") {
      e.op = EditOp::Delete;
    } else if (op == "replace") {
      e.op = EditOp::Replace;
    } else if (op == "relocate") {
      e.op = EditOp::Relocate;
    } else {
      throw DataError("unknown edit operation '" + op + "'");
    }
    e.orig = item[1].get<std::string>();
    e.tgt = item[2].get<std::string>();
    if (auto why = invariant_violation(e)) throw DataError(*why + ": " + item.dump());
    out.push_back(std::move(e));
  }
  return out;
}

json to_json(const SentencePair& pair) {
  json j = {{"id", pair.id},
            {"lang", std::string(to_string(pair.lang))},
            {"source", pair.source},
            {"target", pair.target}};
  if (pair.gold_edits) j["gold_edits"] = edits_to_json(*pair.gold_edits);
  if (pair.cefr) j["cefr"] = std::string(to_string(*pair.cefr));
  return j;
}

namespace {

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

void check_sides(const SentencePair& p, std::size_t line) {
  if (utf8::trim(p.source).empty()) fail_line(line, "empty source");
  if (utf8::trim(p.target).empty()) fail_line(line, "empty target");
}

}  // namespace

SentencePair pair_from_json(const json& j, std::size_t line, std::string default_id) {
  if (!j.is_object()) fail_line(line, "expected a JSON object");
  SentencePair p;
  try {
    if (j.contains("id") && !j["id"].is_null()) {
      p.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    } else {
      p.id = std::move(default_id);
    }
    if (!j.contains("lang")) fail_line(line, "missing field 'lang'");
    p.lang = parse_lang(j.at("lang").get<std::string>());
    p.source = j.at("source").get<std::string>();
    p.target = j.at("target").get<std::string>();
    if (j.contains("gold_edits") && !j["gold_edits"].is_null()) p.gold_edits = edits_from_json(j["gold_edits"]);
    if (j.contains("cefr") && !j["cefr"].is_null()) p.cefr = parse_cefr(j["cefr"].get<std::string>());
  } catch (const json::exception& e) {
    fail_line(line, e.what());
  } catch (const DataError& e) {
    const std::string what = e.what();
    if (what.rfind("line ", 0) == 0) throw;
    fail_line(line, what);
  }
  check_sides(p, line);
  return p;
}

CorpusFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? CorpusFormat::Tsv : CorpusFormat::Jsonl;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

SentencePair pair_from_tsv(const std::string& line, std::size_t number) {
  const auto cols = split_tabs(line);
  if (cols.size() < 4 || cols.size() > 6) fail_line(number, "expected 4 to 6 tab separated columns");
  SentencePair p;
  p.id = cols[0].empty() ? std::to_string(number) : cols[0];
  try {
    p.lang = parse_lang(cols[1]);
    p.source = cols[2];
    p.target = cols[3];
    if (cols.size() > 4 && !utf8::trim(cols[4]).empty()) {
      static const std::regex sep(R"(\]\s*\|\s*\[)");
      const auto text = std::regex_replace(cols[4], sep, "]\n[");
      auto parsed = parse_edit_lines(text);
      if (!parsed.warnings.empty()) fail_line(number, "bad gold edits: " + parsed.warnings.front());
      for (const auto& e : parsed.edits) {
        if (auto why = invariant_violation(e)) fail_line(number, *why);
      }
      p.gold_edits = std::move(parsed.edits);
    }
    if (cols.size() > 5 && !utf8::trim(cols[5]).empty()) p.cefr = parse_cefr(cols[5]);
  } catch (const DataError& e) {
    const std::string what = e.what();
    if (what.rfind("line ", 0) == 0) throw;
    fail_line(number, what);
  }
  check_sides(p, number);
  return p;
}

}  // namespace

std::vector<SentencePair> load_pairs(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<SentencePair> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::trim(line).empty()) continue;
    SentencePair p;
    if (format == CorpusFormat::Jsonl) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        fail_line(number, std::string("invalid JSON: ") + e.what());
      }
      p = pair_from_json(j, number, std::to_string(number));
    } else {
      if (number == 1 && line.rfind("id\tlang\t", 0) == 0) continue;
      p = pair_from_tsv(line, number);
    }
    if (!seen.insert(p.id).second) fail_line(number, "duplicate id '" + p.id + "'");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SentencePair> load_pairs(const std::filesystem::path& path) {
  return load_pairs(path, format_for(path));
}

void save_pairs(const std::filesystem::path& path, std::span<const SentencePair> pairs) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
}

std::optional<FeasibilityResult> check_gold(const SentencePair& pair, const Tokenizer& tokenizer) {
  if (!pair.gold_edits) return std::nullopt;
  return apply_edits(tokenizer(pair.source), pair.target, *pair.gold_edits, tokenizer);
}

std::size_t count_sentences(const TokenSeq& seq) {
  auto terminal = [](const std::string& t) {
    return !t.empty() && t.find_first_not_of(".!?") == std::string::npos;
  };
  std::size_t count = 0;
  bool open = false;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (terminal(seq[i])) {
      if (open) ++count;
      open = false;
    } else {
      open = true;
    }
  }
  return count + (open ? 1 : 0);
}

std::vector<SentencePair> filter_german(std::span<const SentencePair> pairs, const FilterConfig& cfg) {
  std::vector<SentencePair> out;
  for (const auto& p : pairs) {
    const auto s = tokenize_german(p.source);
    const auto t = tokenize_german(p.target);
    if (s.size() < cfg.de_min_tokens || t.size() < cfg.de_min_tokens) continue;
    auto banned = [&](const TokenSeq& seq) {
      return std::any_of(seq.tokens.begin(), seq.tokens.end(),
                         [&](const Token& tok) { return cfg.de_banned_tokens.count(tok.text) > 0; });
    };
    if (banned(s) || banned(t)) continue;
    if (cfg.de_sentence_count_match && count_sentences(s) != count_sentences(t)) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<SentencePair> filter_chinese(std::span<const SentencePair> pairs, const Lexicon& lexicon,
                                         const FilterConfig& cfg) {
  std::vector<SentencePair> out;
  for (const auto& p : pairs) {
    const auto n = tokenize_chinese(p.source, lexicon).size();
    if (n < cfg.zh_min_tokens || n > cfg.zh_max_tokens) continue;
    if (cfg.zh_drop_identical && utf8::trim(p.source) == utf8::trim(p.target)) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<std::string> split_chinese_sentences(std::string_view text, std::u32string_view extra) {
  std::u32string terminators = U"。！？";
  terminators += extra;
  static constexpr std::u32string_view closers = U"”’」』）)\"'";
  const auto cps = utf8::decode(text);
  std::vector<std::string> out;
  std::u32string cur;
  auto flush = [&] {
    auto piece = utf8::trim(utf8::encode(cur));
    if (!piece.empty()) out.push_back(std::move(piece));
    cur.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    cur += cps[i];
    if (terminators.find(cps[i]) == std::u32string::npos) continue;
    while (i + 1 < cps.size() && (terminators.find(cps[i + 1]) != std::u32string::npos ||
                                  closers.find(cps[i + 1]) != std::u32string_view::npos)) {
      cur += cps[++i];
    }
    flush();
  }
  flush();
  return out;
}

CorpusStats corpus_stats(std::span<const SentencePair> pairs, std::shared_ptr<const Lexicon> lexicon) {
  CorpusStats st;
  const Lexicon empty;
  for (const auto& p : pairs) {
    ++st.pair_count;
    if (p.gold_edits) st.edit_count += p.gold_edits->size();
    const std::size_t n = p.lang == Lang::De ? tokenize_german(p.source).size()
                                             : tokenize_chinese(p.source, lexicon ? *lexicon : empty).size();
    ++st.token_length_histogram[n / CorpusStats::kBucketWidth * CorpusStats::kBucketWidth];
  }
  if (st.pair_count > 0) {
    st.mean_edits_per_pair = static_cast<double>(st.edit_count) / static_cast<double>(st.pair_count);
  }
  return st;
}

json to_json(const CorpusStats& stats) {
  json hist = json::object();
  for (const auto& [lo, n] : stats.token_length_histogram) {
    hist[std::to_string(lo) + "-" + std::to_string(lo + CorpusStats::kBucketWidth - 1)] = n;
  }
  return {{"pair_count", stats.pair_count},
          {"edit_count", stats.edit_count},
          {"mean_edits_per_pair", stats.mean_edits_per_pair},
          {"token_length_histogram", hist}};
}

std::size_t export_finetune(std::span<const SentencePair> pairs, const PromptTemplate& tmpl,
                            const std::filesystem::path& path, std::shared_ptr<const Lexicon> lexicon) {
  tmpl.validate();
  std::vector<std::string> lines;
  for (const auto& p : pairs) {
    if (!p.gold_edits) throw DataError("pair '" + p.id + "' has no gold edits");
    if (p.lang != tmpl.language) {
      throw DataError("pair '" + p.id + "' is " + std::string(to_string(p.lang)) + " but the template is " +
                      std::string(to_string(tmpl.language)));
    }
    const Tokenizer tok(p.lang, lexicon);
    const auto coarse = coarse_edits(tok(p.source), tok(p.target));
    json record = {{"messages",
                    json::array({{{"role", "user"}, {"content", render_prompt(tmpl, p, coarse)}},
                                 {{"role", "assistant"}, {"content", serialize_edits(*p.gold_edits)}}})}};
    lines.push_back(record.dump());
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  return lines.size();
}

}  // namespace gee
