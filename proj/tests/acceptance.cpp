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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "annotation_fixture.hpp"
#include "diff_oracle.hpp"
#include "fuzz_pairs.hpp"
#include "gee/atomic.hpp"
#include "gee/cli.hpp"
#include "gee/corpus.hpp"
#include "gee/diff.hpp"
#include "gee/eval.hpp"
#include "gee/explanation.hpp"
#include "gee/llm.hpp"
#include "gee/log.hpp"
#include "gee/prompt.hpp"
#include "test_util.hpp"

using namespace gee;
using gee::testing::TempDir;
using gee::testing::read_text;

namespace {

// Collects failure notes; an empty list means the criterion holds.
struct Checker {
  std::vector<std::string> failures;
  std::size_t dropped = 0;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures.size() < 5) {
      failures.push_back(what);
    } else {
      ++dropped;
    }
  }
};

std::vector<std::string> as_multiset(std::span<const AtomicEdit> edits) {
  std::vector<std::string> out;
  for (const auto& e : edits) out.push_back(serialize_edit(e));
  std::sort(out.begin(), out.end());
  return out;
}

void golden_examples(Checker& c) {
  const std::set<std::string> ids = {"de-appointment",      "de-four-ops",    "de-chance",        "de-bananen-essen",
                                     "de-bananen-gegessen", "de-apfel-local", "de-apfel-nonlocal"};
  const Tokenizer de(Lang::De);
  std::size_t seen = 0;
  for (const auto& p : load_pairs(gee::testing::source_dir() / "data/mini_corpus.jsonl")) {
    if (!ids.count(p.id)) continue;
    ++seen;
    const auto got = extract_rule_based(de(p.source), de(p.target));
    c.expect(as_multiset(got) == as_multiset(*p.gold_edits), p.id + ": got " + serialize_edits(got));
  }
  c.expect(seen == ids.size(), "golden pairs missing from the mini corpus");
}

void round_trip(Checker& c) {
  std::mt19937 rng(20240);
  std::size_t infeasible = 0;
  for (int n = 0; n < 10000; ++n) {
    const auto [a, b] = gee::testing::random_pair(rng, 50);
    const auto src = TokenSeq::from_texts(a, Lang::De);
    const auto tgt = TokenSeq::from_texts(b, Lang::De);
    const auto edits = extract_rule_based(src, tgt);
    if (!apply_edits(src, tgt, edits).feasible()) {
      ++infeasible;
      c.expect(false, "infeasible: " + join_tokens(a, Lang::De) + " -> " + join_tokens(b, Lang::De));
    }
    // Serialized edits carry no spans.
    auto bare = edits;
    for (auto& e : bare) e.src_span = e.tgt_span = std::nullopt;
    const auto text = serialize_edits(edits);
    if (!edits.empty()) {
      const auto parsed = parse_edit_lines(text);
      c.expect(parsed.edits == bare && serialize_edits(parsed.edits) == text, "serialize/parse mismatch: " + text);
    }
    c.expect(edits_from_json(edits_to_json(edits)) == bare, "JSON mismatch: " + text);
  }
  c.expect(infeasible == 0, std::to_string(infeasible) + " of 10000 infeasible");
}

bool partition_ok(const gee::testing::Strings& a, const gee::testing::Strings& b, const std::vector<Opcode>& ops) {
  std::size_t i = 0, j = 0;
  for (const auto& op : ops) {
    if (op.src.lo != i || op.tgt.lo != j || op.src.lo > op.src.hi || op.tgt.lo > op.tgt.hi) return false;
    if (op.src.empty() && op.tgt.empty()) return false;
    if (op.tag == OpcodeTag::Equal) {
      if (op.src.size() != op.tgt.size()) return false;
      if (!std::equal(a.begin() + op.src.lo, a.begin() + op.src.hi, b.begin() + op.tgt.lo)) return false;
    }
    if (op.tag == OpcodeTag::Insert && !op.src.empty()) return false;
    if (op.tag == OpcodeTag::Delete && !op.tgt.empty()) return false;
    i = op.src.hi;
    j = op.tgt.hi;
  }
  return i == a.size() && j == b.size();
}

void diff_oracle(Checker& c) {
  std::mt19937 rng(7);
  const gee::testing::Strings alphabet = {"a", "b", "c", "d"};
  for (int n = 0; n < 50000; ++n) {
    gee::testing::Strings a(rng() % 9), b(rng() % 9);
    for (auto& s : a) s = alphabet[rng() % 4];
    for (auto& s : b) s = alphabet[rng() % 4];
    std::vector<MatchStep> trace;
    const auto ops = opcodes(a, b, &trace);
    for (const auto& step : trace) {
      const auto want = gee::testing::brute_longest(a, b, step.src, step.tgt);
      if (step.chosen.len != want.len || (want.len > 0 && !(step.chosen == want))) {
        c.expect(false, "match differs from exhaustive search");
      }
    }
    c.expect(partition_ok(a, b, ops), "opcodes do not partition both sequences");
  }
}

void metric_arithmetic(Checker& c) {
  const double f1_de = f1_from_pr(0.675, 0.602);
  const double f1_zh = f1_from_pr(0.862, 0.824);
  c.expect(std::abs(f1_de - 0.636) <= 0.001, "f1(0.675, 0.602) = " + std::to_string(f1_de));
  c.expect(std::abs(f1_zh - 0.843) <= 0.001, "f1(0.862, 0.824) = " + std::to_string(f1_zh));

  const auto de_set = gee::testing::build_annotations(gee::testing::german_plan());
  const auto de = aggregate_annotations(de_set.records, de_set.dual_ids);
  const auto zh_set = gee::testing::build_annotations(gee::testing::chinese_plan());
  const auto zh = aggregate_annotations(zh_set.records);
  const double de_ok = de.percentage(MistakeLabel::Correct);
  const double zh_ok = zh.percentage(MistakeLabel::Correct);
  c.expect(std::abs(percent(1865, 1986) - 93.9) <= 0.05 && std::abs(de_ok - 93.9) <= 0.05,
           "German correct = " + format_percent(de_ok));
  c.expect(std::abs(percent(296, 302) - 98.0) <= 0.05 && std::abs(zh_ok - 98.0) <= 0.05,
           "Chinese correct = " + format_percent(zh_ok));
  const double agree = de.agreement ? 100.0 * de.agreement->rate() : -1.0;
  c.expect(std::abs(percent(78 + 8, 96) - 89.6) <= 0.05 && std::abs(agree - 89.6) <= 0.05,
           "agreement = " + format_percent(agree));
}

std::vector<SentencePair> synthetic(std::size_t pairs, std::size_t edits) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < pairs; ++i) {
    SentencePair p;
    p.id = "s" + std::to_string(i);
    p.source = "a b c";
    p.target = "a b d";
    p.gold_edits = std::vector<AtomicEdit>(edits / pairs + (i < edits % pairs ? 1 : 0), make_replace("c", "d"));
    out.push_back(std::move(p));
  }
  return out;
}

void corpus_statistics(Checker& c) {
  const auto de = corpus_stats(synthetic(550, 1784));
  const auto zh = corpus_stats(synthetic(549, 884));
  c.expect(std::abs(de.mean_edits_per_pair - 3.24) <= 0.005, "de mean " + std::to_string(de.mean_edits_per_pair));
  c.expect(std::abs(zh.mean_edits_per_pair - 1.61) <= 0.005, "zh mean " + std::to_string(zh.mean_edits_per_pair));
}

void coverage_fixture(Checker& c) {
  SentencePair p;
  p.id = "antworten";
  p.source = "Bitte antworten sreiben Sie?";
  p.target = "Bitte antworten und schreiben Sie.";
  const std::vector<AtomicEdit> gold = {make_insert("und"), make_replace("sreiben", "schreiben"),
                                        make_replace("?", ".")};
  const auto expl =
      parse_explanations(read_text(gee::testing::source_dir() / "tests/fixtures/base_gee_reply.txt")).explanations;
  const auto cov = coverage(gold, expl, p);
  const bool sie = cov.hallucinated.size() == 1 && cov.hallucinated[0].mention.op == EditOp::Relocate &&
                   cov.hallucinated[0].mention.orig == "Sie";
  c.expect(sie, std::to_string(cov.hallucinated.size()) + " hallucinated mentions, 'Sie' relocation not flagged");
  c.expect(cov.missing_edits == std::vector<std::size_t>{2},
           std::to_string(cov.missing_edits.size()) + " edits missing an explanation");
}

// Every file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), dir).string()] = read_text(e.path());
  }
  return out;
}

int pipeline(const std::filesystem::path& cache, const std::filesystem::path& out_dir,
             std::shared_ptr<Provider> provider) {
  std::filesystem::create_directories(out_dir);
  const auto corpus = (gee::testing::source_dir() / "data/mini_corpus.jsonl").string();
  auto o = [&](const char* name) { return (out_dir / name).string(); };
  const std::vector<std::vector<std::string>> steps = {
      {"preprocess", "-i", corpus, "-o", o("pairs.jsonl")},
      {"extract", "--mode", "llm", "-i", o("pairs.jsonl"), "-o", o("edits.jsonl")},
      {"explain", "-i", o("edits.jsonl"), "-o", o("explanations.jsonl")},
      {"eval-coverage", "--explanations", o("explanations.jsonl"), "-o", o("coverage.json")},
  };
  for (const auto& step : steps) {
    std::vector<std::string> args = {"gee", "--cache-dir", cache.string()};
    args.insert(args.end(), step.begin(), step.end());
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err, provider);
    if (code != kExitOk) return code;
  }
  return kExitOk;
}

void determinism(Checker& c) {
  TempDir dir;
  auto previous = set_warning_sink([](std::string_view) {});
  auto recorder = std::make_shared<OfflineProvider>();
  const int first = pipeline(dir / "cache", dir / "run1", recorder);
  auto live = std::make_shared<ScriptedProvider>(
      [](const CompletionRequest&, std::size_t) { return CompletionResponse{503, "", "no live calls expected"}; });
  const int second = pipeline(dir / "cache", dir / "run2", live);
  set_warning_sink(previous);
  c.expect(first == kExitOk, "first run exited with " + std::to_string(first));
  c.expect(second == kExitOk, "second run exited with " + std::to_string(second));
  c.expect(live->calls() == 0, std::to_string(live->calls()) + " live calls on the second run");
  const auto a = snapshot(dir / "run1");
  const auto b = snapshot(dir / "run2");
  c.expect(!a.empty() && a == b, "outputs differ between runs");
  c.expect(!snapshot(dir / "cache").empty(), "no transcripts recorded");
}

void prompt_checksums(Checker& c) {
  const std::vector<std::tuple<Lang, PromptStep, const char*>> pinned = {
      {Lang::De, PromptStep::BaselineOneShot, "be69afcbff06bc3172c1f44892f8e4d3e36c2fef49b515a271e34c83dc636f0e"},
      {Lang::De, PromptStep::Extract, "46663301e191d95057039f25bab3ccdd82608f9ba956b3d1c5edd33f31f2c2a4"},
      {Lang::De, PromptStep::Explain, "fdd532bff4e5eb0c73ce5b714757d30a1b4ba574d6795446661d6f753ab8a7d6"},
      {Lang::Zh, PromptStep::Extract, "275903ed172792942908c69b1666751a141ff3656e46ce7b4fb936965733a57a"},
      {Lang::Zh, PromptStep::Explain, "9ae91988c83af712bfd91fdb66798cb1781a66b934c478a779d16369db815d9f"},
  };
  for (const auto& [lang, step, digest] : pinned) {
    const auto t = builtin_template(lang, step);
    c.expect(sha256_hex(t.body) == digest, t.name + " checksum changed");
  }
}

struct Criterion {
  int number;
  const char* title;
  std::function<void(Checker&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "golden worked examples", golden_examples},
      {2, "round-trip soundness on 10000 random pairs", round_trip},
      {3, "diff matches the exhaustive oracle", diff_oracle},
      {4, "metric arithmetic", metric_arithmetic},
      {5, "corpus statistics", corpus_statistics},
      {6, "coverage flags the hallucinated relocation", coverage_fixture},
      {7, "cached pipeline is deterministic with no live calls", determinism},
      {8, "model scores and human ratings are not re-measured; prompt bytes pinned instead", prompt_checksums},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << cr.number << "] " << cr.title << " (" << ms << " ms)\n";
    for (const auto& f : c.failures) std::cout << "        " << f << '\n';
    if (c.dropped) std::cout << "        ... and " << c.dropped << " more\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
