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

#include <random>
#include <tuple>

#include "gee/atomic.hpp"
#include "gee/error.hpp"
#include "gee/utf8.hpp"
#include "fuzz_pairs.hpp"

using namespace gee;

namespace {

using Triple = std::tuple<std::string, std::string, std::string>;

std::vector<Triple> triples(const std::vector<AtomicEdit>& edits) {
  std::vector<Triple> out;
  for (const auto& e : edits) out.emplace_back(std::string(to_string(e.op)), e.orig, e.tgt);
  return out;
}

std::vector<Triple> extract_de(std::string_view s, std::string_view t) {
  return triples(extract_rule_based(tokenize_german(s), tokenize_german(t)));
}

// Plain Wagner-Fischer over full matrices, kept apart from the library code.
std::size_t oracle_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

}  // namespace

TEST_CASE("similarity matches an independent distance") {
  CHECK(similarity("haben", "habe") == doctest::Approx(0.8));
  CHECK(similarity("", "") == 1.0);
  CHECK(similarity("a", "") == 0.0);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> ch(0, 3);
  for (int round = 0; round < 500; ++round) {
    std::u32string a;
    std::u32string b;
    for (int k = len(rng); k > 0; --k) a += static_cast<char32_t>(U'a' + ch(rng));
    for (int k = len(rng); k > 0; --k) b += static_cast<char32_t>(U'ä' + ch(rng) % 2);
    CHECK(edit_distance(a, b) == oracle_distance(a, b));
  }
}

TEST_CASE("refine splits the appointment example into atomic edits") {
  auto got = extract_de("Ich möchte machen ein termin.", "Ich möchte einen Termin machen.");
  std::vector<Triple> want = {{"relocate", "machen", "machen"},
                              {"replace", "ein", "einen"},
                              {"replace", "termin", "Termin"}};
  CHECK(got == want);
}

TEST_CASE("refine covers all four operations") {
  auto got = extract_de("möchte machen ein Termine.?", "Ich möchte einen Termine machen.");
  std::vector<Triple> want = {{"insert", "", "Ich"},
                              {"relocate", "machen", "machen"},
                              {"replace", "ein", "einen"},
                              {"delete", "?", ""}};
  CHECK(got == want);
}

TEST_CASE("refine reproduces the worked extraction examples") {
  CHECK(extract_de("Wie oben schon erwähnt ist die Chance erwisht zurweden zwar gering, aber sie ver handen.",
                   "Wie oben schon erwähnt ist die Chance, erwischt zu werden, zwar gering, aber sie ist vorhanden.") ==
        std::vector<Triple>{{"insert", "", ","},
                            {"replace", "erwisht", "erwischt"},
                            {"replace", "zurweden", "zu werden"},
                            {"insert", "", ","},
                            {"insert", "", "ist"},
                            {"replace", "ver handen", "vorhanden"}});
  CHECK(extract_de("ich haben essen zwei Bananen.", "Ich habe zwei Bananen gegessen.") ==
        std::vector<Triple>{{"replace", "ich", "Ich"},
                            {"replace", "haben", "habe"},
                            {"delete", "essen", ""},
                            {"insert", "", "gegessen"}});
  CHECK(extract_de("Ich habe gegessen zwei Bananen.", "Ich habe zwei Bananen gegessen.") ==
        std::vector<Triple>{{"relocate", "gegessen", "gegessen"}});
  CHECK(extract_de("Ich möchte haben einen Apfel.", "Ich möchte einen Apfel haben.") ==
        std::vector<Triple>{{"relocate", "haben", "haben"}});
  CHECK(extract_de("Ich möchte haben einen roten Apfel.", "Ich möchte einen roten Apfel haben.") ==
        std::vector<Triple>{{"relocate", "haben", "haben"}});
  CHECK(extract_de("Bitte antworten sreiben Sie?", "Bitte antworten und schreiben Sie.") ==
        std::vector<Triple>{{"insert", "", "und"}, {"replace", "sreiben", "schreiben"}, {"replace", "?", "."}});
}

TEST_CASE("a word that changes role is replaced, not relocated") {
  CHECK(extract_de("This job is exciting me because I like talking for different people.",
                   "This job is exciting for me because I like talking to different people.") ==
        std::vector<Triple>{{"insert", "", "for"}, {"replace", "for", "to"}});
}

TEST_CASE("identical sentences produce no edits") {
  CHECK(extract_de("Alles gut.", "Alles gut.").empty());
}

TEST_CASE("postprocess drops identity replaces and duplicate anchored edits") {
  CHECK(postprocess({make_replace("x", "x")}).empty());
  CHECK(postprocess({}).empty());
  auto ins = make_insert("a");
  ins.src_span = Span{1, 1};
  ins.tgt_span = Span{1, 2};
  CHECK(postprocess({ins, ins}).size() == 1);
  // Without anchors two equal inserts may be two real edits.
  CHECK(postprocess({make_insert("a"), make_insert("a")}).size() == 2);
  auto src = TokenSeq::from_texts({"b", "b"}, Lang::De);
  auto one = TokenSeq::from_texts({"b", "a", "b"}, Lang::De);
  std::vector<AtomicEdit> single = postprocess({ins, ins});
  CHECK(apply_edits(src, one, single).feasible());
}

TEST_CASE("apply_edits decides feasibility") {
  auto src = tokenize_german("möchte machen ein Termine.?");
  auto tgt = tokenize_german("Ich möchte einen Termine machen.");
  std::vector<AtomicEdit> edits = {make_insert("Ich"), make_relocate("machen"), make_replace("ein", "einen"),
                                   make_delete("?")};
  auto r = apply_edits(src, tgt, edits);
  REQUIRE(r.feasible());
  CHECK(r.realized_target == std::optional<std::string>("Ich möchte einen Termine machen."));
  REQUIRE(r.assignment.size() == 4);
  CHECK(r.assignment[1].src == Span{1, 2});
  CHECK(r.assignment[1].tgt == Span{4, 5});

  CHECK(apply_edits(src, src, {}).feasible());
  CHECK(apply_edits(tokenize_german("a b c"), tokenize_german("a b"), std::vector{make_delete("x")}).status ==
        Feasibility::Infeasible);
  CHECK_FALSE(apply_edits(src, tgt, std::vector<AtomicEdit>(edits.begin(), edits.end() - 1)).feasible());
}

TEST_CASE("a relocation must actually move its token") {
  auto s = tokenize_german("a b c");
  CHECK_FALSE(apply_edits(s, s, std::vector{make_relocate("b")}).feasible());
  CHECK(apply_edits(s, tokenize_german("a c b"), std::vector{make_relocate("b")}).feasible());
}

TEST_CASE("relocation fusion preserves feasibility") {
  auto s = tokenize_german("Ich möchte haben einen Apfel.");
  auto t = tokenize_german("Ich möchte einen Apfel haben.");
  CHECK(apply_edits(s, t, std::vector{make_relocate("haben")}).feasible());
  CHECK(apply_edits(s, t, std::vector{make_delete("haben"), make_insert("haben")}).feasible());
}

TEST_CASE("Chinese edits are matched character by character") {
  Lexicon lex({"菜市场", "水果", "我们"});
  auto s = tokenize_chinese("我们去菜市场买水果", lex);
  auto t = tokenize_chinese("我们去菜市场买了水果", lex);
  CHECK(apply_edits(s, t, std::vector{make_insert("了")}).feasible());
  CHECK(apply_edits(s, t, std::vector{make_replace("买", "买了")}).feasible());
}

TEST_CASE("search stops at the state cap") {
  std::vector<std::string> a(40, "x");
  std::vector<std::string> b(40, "x");
  a.push_back("y");
  b.insert(b.begin(), "y");
  auto s = TokenSeq::from_texts(a, Lang::De);
  auto t = TokenSeq::from_texts(b, Lang::De);
  std::vector<AtomicEdit> edits(6, make_relocate("x"));
  edits.push_back(make_relocate("y"));
  ApplyOptions tiny;
  tiny.max_states = 5;
  auto r = apply_edits(s, t, edits, tiny);
  CHECK(r.status == Feasibility::Undecided);
  CHECK(r.states_explored <= 5);
}

TEST_CASE("serialize writes the bracket format") {
  CHECK(serialize_edit(make_insert("Ich")) == R"(["insert", "", "Ich"])");
  CHECK(serialize_edit(make_relocate("machen")) == R"(["relocate", "machen", "machen"])");
  CHECK(serialize_edits({}).empty());
  CHECK(serialize_edit(make_replace("a\"b", "c")) == R"(["replace", "a\"b", "c"])");
}

TEST_CASE("parse_edit_lines is lenient") {
  auto p = parse_edit_lines("Atomic edits:\n[\"replace\", \"ein\", \"einen\"]\n['delete', '?', ''],\n");
  REQUIRE(p.edits.size() == 2);
  CHECK(p.edits[0] == make_replace("ein", "einen"));
  CHECK(p.edits[1] == make_delete("?"));
  CHECK(p.warnings.size() == 1);

  auto bare = parse_edit_lines("[insert, , Ich]\n[relocate, machen, machen]");
  REQUIRE(bare.edits.size() == 2);
  CHECK(bare.edits[0] == make_insert("Ich"));
  CHECK(bare.edits[1] == make_relocate("machen"));

  auto demoted = parse_edit_lines(R"(["relocate", "essen", "gegessen"])");
  REQUIRE(demoted.edits.size() == 2);
  CHECK(demoted.edits[0] == make_delete("essen"));
  CHECK(demoted.edits[1] == make_insert("gegessen"));
  CHECK_FALSE(demoted.warnings.empty());

  auto apostrophe = parse_edit_lines("['replace', \"geht's\", 'gehts']");
  REQUIRE(apostrophe.edits.size() == 1);
  CHECK(apostrophe.edits[0].orig == "geht's");

  CHECK(parse_edit_lines("").edits.empty());
  CHECK(parse_edit_lines("  \n").edits.empty());
  CHECK_THROWS_AS(parse_edit_lines("I could not find any edits."), DataError);
  try {
    parse_edit_lines("prose only");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("prose only") != std::string::npos);
  }
}

TEST_CASE("parse and serialize are inverse on random edit lists") {
  std::mt19937 rng(11);
  const auto& vocab = testing::fuzz_vocab();
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> op(0, 3);
  for (int round = 0; round < 300; ++round) {
    std::vector<AtomicEdit> edits;
    for (int k = op(rng) + 1; k > 0; --k) {
      std::string a = vocab[word(rng)];
      std::string b = vocab[word(rng)];
      if (a == b) b += "\"x";
      switch (op(rng)) {
        case 0: edits.push_back(make_insert(b)); break;
        case 1: edits.push_back(make_delete(a)); break;
        case 2: edits.push_back(make_replace(a, b)); break;
        default: edits.push_back(make_relocate(a)); break;
      }
    }
    const auto text = serialize_edits(edits);
    const auto parsed = parse_edit_lines(text);
    CHECK(parsed.edits == edits);
    CHECK(parsed.warnings.empty());
    CHECK(serialize_edits(parsed.edits) == text);
  }
}

TEST_CASE("single quoted lines parse like double quoted ones") {
  std::vector<AtomicEdit> edits = {make_insert("Ich"), make_delete("?"), make_replace("ein", "einen")};
  std::string text = serialize_edits(edits);
  std::replace(text.begin(), text.end(), '"', '\'');
  CHECK(parse_edit_lines(text).edits == edits);
}

TEST_CASE("refined edits always reach the target") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 500; ++round) {
    auto [a, b] = testing::random_pair(rng);
    auto s = TokenSeq::from_texts(a, Lang::De);
    auto t = TokenSeq::from_texts(b, Lang::De);
    auto edits = extract_rule_based(s, t);
    auto r = apply_edits(s, t, edits);
    const std::string context =
        join_tokens(a, Lang::De) + "\n" + join_tokens(b, Lang::De) + "\n" + serialize_edits(edits);
    CHECK_MESSAGE(r.feasible(), context);
    for (const auto& e : edits) CHECK_FALSE(invariant_violation(e));
  }
}
