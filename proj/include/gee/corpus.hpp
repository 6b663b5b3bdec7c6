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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gee/atomic.hpp"
#include "gee/tokenize.hpp"
#include "json.hpp"

namespace gee {

enum class Cefr { A1, A2, B1, B2, C1, C2 };

std::string_view to_string(Cefr level);
// Throws DataError on anything but A1..C2.
Cefr parse_cefr(std::string_view text);

// One (erroneous, corrected) sentence pair.
struct SentencePair {
  std::string id;
  Lang lang = Lang::De;
  std::string source;
  std::string target;
  std::optional<std::vector<AtomicEdit>> gold_edits;
  std::optional<Cefr> cefr;
};

// JSONL schema: {"id", "lang", "source", "target", "gold_edits": [[op, orig, tgt], ...], "cefr"}.
nlohmann::json to_json(const SentencePair& pair);
// `line` only feeds error messages. Unknown fields are ignored.
SentencePair pair_from_json(const nlohmann::json& j, std::size_t line, std::string default_id);

nlohmann::json edits_to_json(std::span<const AtomicEdit> edits);
std::vector<AtomicEdit> edits_from_json(const nlohmann::json& j);

enum class CorpusFormat { Jsonl, Tsv };

// ".tsv" selects Tsv, anything else Jsonl.
CorpusFormat format_for(const std::filesystem::path& path);

// TSV columns: id, lang, source, target, [gold edit lines joined by "|"], [cefr].
// Missing ids default to the 1-based line number. Errors name the line.
std::vector<SentencePair> load_pairs(const std::filesystem::path& path, CorpusFormat format);
std::vector<SentencePair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::filesystem::path& path, std::span<const SentencePair> pairs);

// Checks that the gold edits rebuild the target. nullopt when the pair has none.
std::optional<FeasibilityResult> check_gold(const SentencePair& pair, const Tokenizer& tokenizer);

struct FilterConfig {
  std::size_t de_min_tokens = 3;
  std::set<std::string> de_banned_tokens = {"incomp", "unreadable"};
  bool de_sentence_count_match = true;
  std::size_t zh_min_tokens = 5;
  std::size_t zh_max_tokens = 50;
  bool zh_drop_identical = true;
};

std::vector<SentencePair> filter_german(std::span<const SentencePair> pairs, const FilterConfig& cfg = {});
std::vector<SentencePair> filter_chinese(std::span<const SentencePair> pairs, const Lexicon& lexicon,
                                         const FilterConfig& cfg = {});

// Sentences in a German token sequence: runs of . ! ? tokens each close one,
// and trailing words without a terminator form one more.
std::size_t count_sentences(const TokenSeq& seq);

// Splits after 。！？ (plus `extra`), keeping the terminator and any closing
// quote after it with its sentence. Blank pieces are dropped.
std::vector<std::string> split_chinese_sentences(std::string_view text, std::u32string_view extra = {});

struct CorpusStats {
  std::size_t pair_count = 0;
  std::size_t edit_count = 0;
  double mean_edits_per_pair = 0.0;
  // Bucket start (0, 10, 20, ...) of the source token length -> pair count.
  std::map<std::size_t, std::size_t> token_length_histogram;

  static constexpr std::size_t kBucketWidth = 10;
};

CorpusStats corpus_stats(std::span<const SentencePair> pairs,
                         std::shared_ptr<const Lexicon> lexicon = nullptr);
nlohmann::json to_json(const CorpusStats& stats);

struct PromptTemplate;

// Writes one chat record per pair: the rendered extraction prompt as the user
// turn and the serialized gold edits as the assistant turn. Returns the count.
std::size_t export_finetune(std::span<const SentencePair> pairs, const PromptTemplate& tmpl,
                            const std::filesystem::path& path,
                            std::shared_ptr<const Lexicon> lexicon = nullptr);

}  // namespace gee
