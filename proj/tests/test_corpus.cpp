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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "gee/atomic.hpp"
#include "gee/corpus.hpp"
#include "gee/error.hpp"
#include "gee/prompt.hpp"
#include "test_util.hpp"

using namespace gee;
using gee::testing::TempDir;
using gee::testing::read_text;
using gee::testing::write_text;

namespace {

SentencePair pair(std::string id, Lang lang, std::string src, std::string tgt) {
  SentencePair p;
  p.id = std::move(id);
  p.lang = lang;
  p.source = std::move(src);
  p.target = std::move(tgt);
  return p;
}

std::vector<std::string> ids(const std::vector<SentencePair>& pairs) {
  std::vector<std::string> out;
  for (const auto& p : pairs) out.push_back(p.id);
  return out;
}

std::vector<SentencePair> mini_corpus() { return load_pairs(gee::testing::source_dir() / "data/mini_corpus.jsonl"); }

// Builds `pairs` records carrying `edits` gold edits in total, spread evenly.
std::vector<SentencePair> synthetic(std::size_t pairs, std::size_t edits) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < pairs; ++i) {
    auto p = pair("p" + std::to_string(i), Lang::De, "a b c", "a b d");
    const std::size_t n = edits / pairs + (i < edits % pairs ? 1 : 0);
    p.gold_edits = std::vector<AtomicEdit>(n, make_replace("c", "d"));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("JSONL loading") {
  TempDir dir;
  write_text(dir / "one.jsonl", R"({"id":"1","lang":"de","source":"a b c","target":"a b c","extra":true})" "\n");
  const auto one = load_pairs(dir / "one.jsonl");
  REQUIRE(one.size() == 1);
  CHECK(one[0].id == "1");
  CHECK(one[0].source == "a b c");
  CHECK(!one[0].gold_edits);

  write_text(dir / "empty.jsonl", "");
  CHECK(load_pairs(dir / "empty.jsonl").empty());

  write_text(dir / "noid.jsonl", "\n" R"({"lang":"zh","source":"我去","target":"我去了","cefr":null})" "\n");
  const auto noid = load_pairs(dir / "noid.jsonl");
  REQUIRE(noid.size() == 1);
  CHECK(noid[0].id == "2");
  CHECK(noid[0].lang == Lang::Zh);
}

TEST_CASE("JSONL errors carry the line number") {
  TempDir dir;
  const std::string good = R"({"id":"a","lang":"de","source":"x","target":"y"})";
  auto message = [&](const std::string& text) {
    write_text(dir / "bad.jsonl", text);
    try {
      load_pairs(dir / "bad.jsonl");
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(good + "\n{not json\n").find("line 2") != std::string::npos);
  CHECK(message(good + "\n" + good + "\n").find("duplicate id 'a'") != std::string::npos);
  CHECK(message(R"({"id":"b","source":"x","target":"y"})").find("line 1") != std::string::npos);
  CHECK(message(R"({"id":"b","lang":"de","source":"  ","target":"y"})").find("line 1") != std::string::npos);
  CHECK(message(R"({"id":"b","lang":"de","source":"x","target":"y","gold_edits":[["relocate","a","b"]]})")
            .find("line 1") != std::string::npos);
  CHECK(message(R"({"id":"b","lang":"de","source":"x","target":"y","cefr":"D1"})").find("line 1") !=
        std::string::npos);
  CHECK_THROWS_AS(load_pairs(dir / "missing.jsonl"), DataError);
}

TEST_CASE("TSV loading") {
  TempDir dir;
  write_text(dir / "c.tsv",
             "id\tlang\tsource\ttarget\tgold_edits\tcefr\n"
             "x1\tde\tIch gehe in der Schule.\tIch gehe in die Schule.\t[\"replace\", \"der\", \"die\"]\tA2\n"
             "x2\tde\tEr fliegt nächster Monat Deutschland.\tEr fliegt nächsten Monat nach Deutschland.\t"
             "[\"insert\", \"\", \"nach\"] | [\"replace\", \"nächster\", \"nächsten\"]\t\n"
             "\tzh\t我去\t我去了\n");
  const auto pairs = load_pairs(dir / "c.tsv");
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].cefr == Cefr::A2);
  REQUIRE(pairs[0].gold_edits);
  CHECK(*pairs[0].gold_edits == std::vector<AtomicEdit>{make_replace("der", "die")});
  REQUIRE(pairs[1].gold_edits);
  CHECK(pairs[1].gold_edits->size() == 2);
  CHECK(!pairs[1].cefr);
  CHECK(pairs[2].id == "4");
  write_text(dir / "bad.tsv", "x\tde\tonly three\n");
  CHECK_THROWS_WITH_AS(load_pairs(dir / "bad.tsv"), doctest::Contains("line 1"), DataError);
}

TEST_CASE("save and load round trip") {
  TempDir dir;
  auto pairs = mini_corpus();
  pairs[0].cefr = Cefr::C1;
  save_pairs(dir / "out.jsonl", pairs);
  const auto back = load_pairs(dir / "out.jsonl");
  REQUIRE(back.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(back[i].id == pairs[i].id);
    CHECK(back[i].source == pairs[i].source);
    CHECK(back[i].target == pairs[i].target);
    CHECK(back[i].gold_edits == pairs[i].gold_edits);
    CHECK(back[i].cefr == pairs[i].cefr);
  }
  save_pairs(dir / "again.jsonl", back);
  CHECK(read_text(dir / "out.jsonl") == read_text(dir / "again.jsonl"));
}

TEST_CASE("the bundled mini corpus has valid gold edits") {
  const auto pairs = mini_corpus();
  CHECK(pairs.size() == 20);
  const Tokenizer de(Lang::De);
  const Tokenizer zh(Lang::Zh, default_lexicon());
  for (const auto& p : pairs) {
    INFO(p.id);
    REQUIRE(p.gold_edits);
    const auto r = check_gold(p, p.lang == Lang::De ? de : zh);
    REQUIRE(r);
    CHECK(r->feasible());
    CHECK(r->realized_target == p.target);
  }
  CHECK(!check_gold(pair("n", Lang::De, "a b", "a c"), de));
}

TEST_CASE("German filters") {
  const std::vector<SentencePair> pairs = {
      pair("short", Lang::De, "Hallo .", "Hallo Welt ."),
      pair("short-target", Lang::De, "Hallo du da.", "Hallo."),
      pair("unreadable", Lang::De, "Das ist unreadable hier.", "Das ist hier."),
      pair("incomp", Lang::De, "Das ist gut.", "Das ist incomp gut."),
      pair("split", Lang::De, "Ich bin hier. Du bist da.", "Ich bin hier und du bist da."),
      pair("ok", Lang::De, "Ich gehe in der Schule.", "Ich gehe in die Schule."),
      pair("date", Lang::De, "Bis 30.04. muss ich gehen.", "Bis 30.04. muss ich weg."),
  };
  const auto kept = filter_german(pairs);
  CHECK(ids(kept) == std::vector<std::string>{"ok", "date"});
  CHECK(ids(filter_german(kept)) == ids(kept));

  FilterConfig loose;
  loose.de_sentence_count_match = false;
  loose.de_min_tokens = 1;
  loose.de_banned_tokens.clear();
  CHECK(filter_german(pairs, loose).size() == pairs.size());
}

TEST_CASE("sentence counting") {
  CHECK(count_sentences(tokenize_german("Ich bin hier. Du bist da.")) == 2);
  CHECK(count_sentences(tokenize_german("Ich bin hier und du bist da.")) == 1);
  CHECK(count_sentences(tokenize_german("Was?! Nein.")) == 2);
  CHECK(count_sentences(tokenize_german("Ohne Punkt")) == 1);
  CHECK(count_sentences(tokenize_german("Am 1.2. ca. um 3 Uhr.")) == 1);
  CHECK(count_sentences(tokenize_german("")) == 0);
}

TEST_CASE("Chinese filters") {
  const Lexicon lex;
  std::string thirty;
  for (int i = 0; i < 30; ++i) thirty += "字";
  std::string sixty = thirty + thirty;
  const std::vector<SentencePair> pairs = {
      pair("four", Lang::Zh, "我去北京", "我去了北京"),
      pair("same", Lang::Zh, "我去了北京。", "我去了北京。"),
      pair("thirty", Lang::Zh, thirty, thirty + "。"),
      pair("sixty", Lang::Zh, sixty, sixty + "。"),
      pair("five", Lang::Zh, "我去北京。", "我去了北京。"),
  };
  const auto kept = filter_chinese(pairs, lex);
  CHECK(ids(kept) == std::vector<std::string>{"thirty", "five"});
  CHECK(ids(filter_chinese(kept, lex)) == ids(kept));
  // With a lexicon the token count, not the character count, decides.
  CHECK(filter_chinese(std::vector<SentencePair>{pairs[4]}, Lexicon({"北京"})).empty());
}

TEST_CASE("Chinese sentence splitting") {
  CHECK(split_chinese_sentences("我来了。你呢？") == std::vector<std::string>{"我来了。", "你呢？"});
  CHECK(split_chinese_sentences("没有终止符") == std::vector<std::string>{"没有终止符"});
  CHECK(split_chinese_sentences("我来了。你呢") == std::vector<std::string>{"我来了。", "你呢"});
  CHECK(split_chinese_sentences("他说：“好。”我走了！！") == std::vector<std::string>{"他说：“好。”", "我走了！！"});
  CHECK(split_chinese_sentences("一；二", U"；") == std::vector<std::string>{"一；", "二"});
  CHECK(split_chinese_sentences("").empty());
}

TEST_CASE("a hand split sample of ten sentences") {
  const std::string text =
      "今天天气很好。我们去公园吧！你觉得怎么样？他说：“可以。”我们走了。"
      "公园里人很多。孩子们在玩。老人在下棋！我们玩得很开心。明天再来吧";
  const std::vector<std::string> want = {"今天天气很好。", "我们去公园吧！", "你觉得怎么样？", "他说：“可以。”",
                                         "我们走了。",     "公园里人很多。", "孩子们在玩。",   "老人在下棋！",
                                         "我们玩得很开心。", "明天再来吧"};
  CHECK(split_chinese_sentences(text) == want);
}

TEST_CASE("corpus statistics") {
  const auto de = corpus_stats(synthetic(550, 1784));
  CHECK(de.pair_count == 550);
  CHECK(de.edit_count == 1784);
  CHECK(std::abs(de.mean_edits_per_pair - 3.24) <= 0.005);
  const auto zh = corpus_stats(synthetic(549, 884));
  CHECK(std::abs(zh.mean_edits_per_pair - 1.61) <= 0.005);
  const auto one = corpus_stats(synthetic(1, 0));
  CHECK(one.mean_edits_per_pair == 0.0);
  const auto none = corpus_stats({});
  CHECK(none.pair_count == 0);
  CHECK(none.mean_edits_per_pair == 0.0);
  for (const auto& s : {de, zh, one}) {
    CHECK(s.mean_edits_per_pair * static_cast<double>(s.pair_count) ==
          doctest::Approx(static_cast<double>(s.edit_count)).epsilon(1e-12));
  }
  CHECK(de.token_length_histogram == std::map<std::size_t, std::size_t>{{0, 550}});
  const auto j = to_json(de);
  CHECK(j["token_length_histogram"]["0-9"] == 550);
}

TEST_CASE("statistics over the mini corpus") {
  const auto pairs = mini_corpus();
  const auto st = corpus_stats(pairs, default_lexicon());
  std::size_t edits = 0;
  for (const auto& p : pairs) edits += p.gold_edits->size();
  CHECK(st.pair_count == 20);
  CHECK(st.edit_count == edits);
  std::size_t total = 0;
  for (const auto& [bucket, n] : st.token_length_histogram) {
    CHECK(bucket % CorpusStats::kBucketWidth == 0);
    total += n;
  }
  CHECK(total == 20);
}

TEST_CASE("fine-tuning export") {
  TempDir dir;
  const auto de_tmpl = builtin_template(Lang::De, PromptStep::Extract);
  CHECK(export_finetune({}, de_tmpl, dir / "empty.jsonl") == 0);
  CHECK(read_text(dir / "empty.jsonl").empty());

  const auto pairs = mini_corpus();
  std::vector<SentencePair> de, zh;
  for (const auto& p : pairs) (p.lang == Lang::De ? de : zh).push_back(p);
  const auto zh_tmpl = builtin_template(Lang::Zh, PromptStep::Extract);
  const auto n = export_finetune(de, de_tmpl, dir / "de.jsonl") +
                 export_finetune(zh, zh_tmpl, dir / "zh.jsonl", default_lexicon());
  CHECK(n == 20);

  std::size_t checked = 0;
  for (const auto& [file, group] : {std::pair{"de.jsonl", &de}, std::pair{"zh.jsonl", &zh}}) {
    std::istringstream lines(read_text(dir / file));
    std::string line;
    std::size_t i = 0;
    while (std::getline(lines, line)) {
      const auto& p = (*group)[i++];
      const auto rec = nlohmann::json::parse(line);
      const auto user = rec["messages"][0]["content"].get<std::string>();
      CHECK(rec["messages"][0]["role"] == "user");
      CHECK(rec["messages"][1]["role"] == "assistant");
      CHECK(user.find(p.source) != std::string::npos);
      CHECK(user.find(p.target) != std::string::npos);
      auto parsed = parse_edit_lines(rec["messages"][1]["content"].get<std::string>());
      CHECK(parsed.warnings.empty());
      auto want = *p.gold_edits;
      auto key = [](const AtomicEdit& e) { return serialize_edit(e); };
      auto by_key = [&](const AtomicEdit& a, const AtomicEdit& b) { return key(a) < key(b); };
      std::sort(parsed.edits.begin(), parsed.edits.end(), by_key);
      std::sort(want.begin(), want.end(), by_key);
      CHECK(parsed.edits == want);
      ++checked;
    }
    CHECK(i == group->size());
  }
  CHECK(checked == 20);

  auto bare = pair("no-gold", Lang::De, "a b c", "a b d");
  CHECK_THROWS_WITH_AS(export_finetune(std::vector<SentencePair>{bare}, de_tmpl, dir / "x.jsonl"),
                       doctest::Contains("no-gold"), DataError);
  CHECK_THROWS_AS(export_finetune(zh, de_tmpl, dir / "x.jsonl"), DataError);
}

TEST_CASE("CEFR levels") {
  CHECK(parse_cefr("b2") == Cefr::B2);
  CHECK(to_string(Cefr::C2) == "C2");
  CHECK_THROWS_AS(parse_cefr("X"), DataError);
}
