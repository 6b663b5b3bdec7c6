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

#include "gee/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <tuple>

#include "gee/error.hpp"
#include "gee/log.hpp"
#include "gee/utf8.hpp"

namespace gee {

using nlohmann::json;

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf r;
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = f1_from_pr(r.precision, r.recall);
  return r;
}

double f1_from_pr(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::string_view to_string(ReviewStatus status) {
  switch (status) {
    case ReviewStatus::ExactMatch:
      return "exact_match";
    case ReviewStatus::FeasibleUnmatched:
      return "feasible_unmatched";
    case ReviewStatus::Infeasible:
      return "infeasible";
  }
  return "?";
}

void EditMatchReport::refresh() {
  const auto r = prf(tp, fp, fn);
  precision = r.precision;
  recall = r.recall;
  f1 = r.f1;
}

EditMatchReport& EditMatchReport::operator+=(const EditMatchReport& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  review_queue.insert(review_queue.end(), other.review_queue.begin(), other.review_queue.end());
  refresh();
  return *this;
}

EditMatchReport match_edits(std::span<const AtomicEdit> predicted, std::span<const AtomicEdit> gold,
                            const SentencePair& pair, const Tokenizer& tokenizer) {
  const auto src = tokenizer(pair.source);
  const auto tgt = tokenizer(pair.target);
  const auto gold_check = apply_edits(src, tgt, gold);
  if (gold_check.status == Feasibility::Infeasible) {
    throw DataError("pair '" + pair.id + "': gold edits do not rebuild the target");
  }
  if (gold_check.status == Feasibility::Undecided) {
    warn("pair '" + pair.id + "': gold edits could not be verified within the search budget");
  }

  EditMatchReport report;
  std::vector<bool> used(gold.size(), false);
  std::vector<std::size_t> unmatched;
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    bool hit = false;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!used[g] && gold[g].same_triple(predicted[p])) {
        used[g] = true;
        hit = true;
        break;
      }
    }
    if (hit) {
      ++report.tp;
      report.review_queue.push_back({pair.id, predicted[p], ReviewStatus::ExactMatch, false});
    } else {
      unmatched.push_back(p);
    }
  }
  if (!unmatched.empty()) {
    const bool feasible = apply_edits(src, tgt, predicted).feasible();
    for (auto p : unmatched) {
      report.review_queue.push_back(
          {pair.id, predicted[p], feasible ? ReviewStatus::FeasibleUnmatched : ReviewStatus::Infeasible, false});
    }
  }
  report.fp = unmatched.size();
  report.fn = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  report.refresh();
  return report;
}

std::vector<Adjudication> load_adjudications(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Adjudication> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (utf8::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Adjudication a;
      a.pair_id = j.at("pair_id").is_string() ? j.at("pair_id").get<std::string>() : j.at("pair_id").dump();
      const auto edits = edits_from_json(json::array({j.at("edit")}));
      a.edit = edits.front();
      const auto verdict = j.at("verdict").get<std::string>();
      if (verdict == "accept" || verdict == "tp") {
        a.accept = true;
      } else if (verdict != "reject" && verdict != "fp") {
        throw DataError("unknown verdict '" + verdict + "'");
      }
      out.push_back(std::move(a));
    } catch (const std::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void apply_adjudications(EditMatchReport& report, std::span<const Adjudication> verdicts) {
  for (const auto& v : verdicts) {
    if (!v.accept) continue;
    auto it = std::find_if(report.review_queue.begin(), report.review_queue.end(), [&](const ReviewItem& r) {
      return r.pair_id == v.pair_id && r.status == ReviewStatus::FeasibleUnmatched && !r.adjudicated &&
             r.edit.same_triple(v.edit);
    });
    if (it == report.review_queue.end()) {
      warn("adjudication for pair '" + v.pair_id + "' " + serialize_edit(v.edit) +
           " matches no feasible unmatched edit");
      continue;
    }
    it->adjudicated = true;
    ++report.tp;
    --report.fp;
  }
  report.refresh();
}

// --- coverage --------------------------------------------------------------------------

namespace {

bool word_char(char32_t cp) { return !utf8::is_space(cp) && !utf8::is_punct(cp); }

struct Quote {
  std::size_t begin;  // code point index of the opening mark
  std::size_t end;    // one past the closing mark
  std::string text;
};

std::vector<Quote> find_quotes(const std::u32string& s) {
  static const std::vector<std::pair<char32_t, std::u32string>> marks = {
      {U'\'', U"'"}, {U'"', U"\""},  {U'`', U"'`"}, {U'‘', U"’'"}, {U'“', U"”\""},
      {U'„', U"“”"}, {U'«', U"»"},  {U'»', U"«"},  {U'「', U"」"}, {U'『', U"』"}};
  std::vector<Quote> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto open = std::find_if(marks.begin(), marks.end(), [&](const auto& m) { return m.first == s[i]; });
    if (open == marks.end() || (i > 0 && word_char(s[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    bool closed = false;
    for (; j < s.size(); ++j) {
      if (open->second.find(s[j]) == std::u32string::npos) continue;
      if (j + 1 < s.size() && word_char(s[j + 1])) continue;
      closed = j > i + 1;
      break;
    }
    if (!closed) {
      ++i;
      continue;
    }
    out.push_back({i, j + 1, utf8::trim(utf8::encode(s.substr(i + 1, j - i - 1)))});
    i = j + 1;
  }
  return out;
}

std::optional<EditOp> verb_op(std::string verb) {
  for (auto& c : verb) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (verb == "replaced" || verb == "changed" || verb == "corrected" || verb == "substituted") {
    return EditOp::Replace;
  }
  if (verb == "inserted" || verb == "added") return EditOp::Insert;
  if (verb == "deleted" || verb == "removed" || verb == "omitted" || verb == "dropped") return EditOp::Delete;
  if (verb == "relocated" || verb == "moved") return EditOp::Relocate;
  return std::nullopt;
}

Mention make_mention(EditOp op, std::string subject, std::string object) {
  switch (op) {
    case EditOp::Insert:
      return {op, "", std::move(subject)};
    case EditOp::Delete:
      return {op, std::move(subject), ""};
    case EditOp::Relocate:
      return {op, subject, subject};
    case EditOp::Replace:
      break;
  }
  return {op, std::move(subject), std::move(object)};
}

constexpr const char* kAux = R"((?:(?:is|are|was|were|has been|have been|should be|must be|needs to be|need to be)\s+)?)";
constexpr const char* kVerb = R"((replaced|changed|corrected|substituted|inserted|added|deleted|removed|omitted|dropped|relocated|moved))";

std::string strip_edge_punct(const std::string& w) {
  auto cps = utf8::decode(w);
  while (!cps.empty() && utf8::is_punct(cps.back())) cps.pop_back();
  while (!cps.empty() && utf8::is_punct(cps.front())) cps.erase(cps.begin());
  return utf8::encode(cps);
}

}  // namespace

std::vector<Mention> extract_mentions(std::string_view edit_desc) {
  const auto cps = utf8::decode(edit_desc);
  const auto quotes = find_quotes(cps);
  // Quotes become \x01<n>\x02 so one regex covers every quote style.
  std::string norm;
  std::size_t pos = 0;
  for (std::size_t q = 0; q < quotes.size(); ++q) {
    norm += utf8::encode(cps.substr(pos, quotes[q].begin - pos));
    norm += "\x01" + std::to_string(q) + "\x02";
    pos = quotes[q].end;
  }
  norm += utf8::encode(cps.substr(pos));

  std::vector<Mention> out;
  static const std::regex quoted(std::string(R"(\x01(\d+)\x02\s+)") + kAux + kVerb +
                                     R"((?:\s+(?:by|with|to|into)\s+\x01(\d+)\x02)?)",
                                 std::regex::icase);
  for (auto it = std::sregex_iterator(norm.begin(), norm.end(), quoted); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const auto op = verb_op(m[2].str());
    if (!op) continue;
    const auto& subject = quotes[std::stoul(m[1].str())].text;
    std::string object = m[3].matched ? quotes[std::stoul(m[3].str())].text : "";
    out.push_back(make_mention(*op, subject, std::move(object)));
  }
  if (!out.empty() || !quotes.empty()) return out;

  static const std::regex bare(std::string(R"(\bthe (?:word|words|phrase|token)\s+(\S+)\s+)") + kAux + kVerb +
                                   R"((?:\s+(?:by|with|to|into)\s+(\S+))?)",
                               std::regex::icase);
  const std::string text(edit_desc);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), bare); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const auto op = verb_op(m[2].str());
    if (!op) continue;
    out.push_back(make_mention(*op, strip_edge_punct(m[1].str()), m[3].matched ? strip_edge_punct(m[3].str()) : ""));
  }
  return out;
}

namespace {

std::vector<std::string> words_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// 2 per side whose text equals the edit's, 1 per side that is one of its
// words (or the reverse), plus 1 when the operation agrees. 0 = unrelated.
int mention_score(const Mention& m, const AtomicEdit& e) {
  const std::string eo = utf8::strip_space(e.orig);
  const std::string et = utf8::strip_space(e.tgt);
  int score = 0;
  auto side = [&](const std::string& text) {
    if (text.empty()) return 0;
    const auto flat = utf8::strip_space(text);
    if (flat == eo || flat == et) return 2;
    for (const auto* edit_text : {&e.orig, &e.tgt}) {
      if (edit_text->empty()) continue;
      const auto ew = words_of(*edit_text);
      const auto mw = words_of(text);
      if (std::find(ew.begin(), ew.end(), text) != ew.end()) return 1;
      if (std::find(mw.begin(), mw.end(), *edit_text) != mw.end()) return 1;
    }
    return 0;
  };
  score += side(m.orig);
  if (m.tgt != m.orig) score += side(m.tgt);
  if (score > 0 && m.op == e.op) ++score;
  return score;
}

// Weak link for explanations without any parsable mention: every side of the
// edit appears among the description's words.
int fallback_score(const std::string& desc, const AtomicEdit& e) {
  std::vector<std::string> words;
  for (const auto& w : words_of(desc)) words.push_back(strip_edge_punct(w));
  auto present = [&](const std::string& text) {
    if (text.empty()) return true;
    for (const auto& w : words_of(text)) {
      if (std::find(words.begin(), words.end(), strip_edge_punct(w)) == words.end()) return false;
    }
    return true;
  };
  return present(e.orig) && present(e.tgt) ? 1 : 0;
}

}  // namespace

CoverageReport coverage(std::span<const AtomicEdit> edits, std::span<const Explanation> explanations,
                        const SentencePair& pair) {
  (void)pair;
  CoverageReport report;
  report.total_edits = edits.size();
  // (score, explanation, edit)
  std::vector<std::tuple<int, std::size_t, std::size_t>> cands;
  for (std::size_t x = 0; x < explanations.size(); ++x) {
    const auto mentions = extract_mentions(explanations[x].edit_desc);
    bool any = false;
    for (const auto& m : mentions) {
      int best = 0;
      for (std::size_t e = 0; e < edits.size(); ++e) {
        const int s = mention_score(m, edits[e]);
        best = std::max(best, s);
        if (s > 0) {
          cands.emplace_back(s, x, e);
          any = true;
        }
      }
      if (best == 0) report.hallucinated.push_back({x, m});
    }
    if (mentions.empty()) {
      for (std::size_t e = 0; e < edits.size(); ++e) {
        if (fallback_score(explanations[x].sentence(), edits[e]) > 0) {
          cands.emplace_back(1, x, e);
          any = true;
        }
      }
      if (!any) report.unresolved.push_back(x);
    }
  }
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
  });
  std::vector<bool> x_used(explanations.size(), false);
  std::vector<bool> e_used(edits.size(), false);
  for (const auto& [score, x, e] : cands) {
    if (x_used[x] || e_used[e]) continue;
    x_used[x] = true;
    e_used[e] = true;
    report.matched.emplace_back(e, x);
  }
  std::sort(report.matched.begin(), report.matched.end());
  for (std::size_t e = 0; e < edits.size(); ++e) {
    if (!e_used[e]) report.missing_edits.push_back(e);
  }
  report.coverage_rate =
      edits.empty() ? 1.0 : static_cast<double>(report.matched.size()) / static_cast<double>(edits.size());
  return report;
}

// --- annotations -------------------------------------------------------------------------

std::string_view to_string(MistakeLabel label) {
  switch (label) {
    case MistakeLabel::Correct:
      return "correct";
    case MistakeLabel::WrongEditDescription:
      return "wrong_edit_description";
    case MistakeLabel::WrongEditReason:
      return "wrong_edit_reason";
    case MistakeLabel::WrongErrorType:
      return "wrong_error_type";
    case MistakeLabel::HallucinatedError:
      return "hallucinated_error";
    case MistakeLabel::MissingError:
      return "missing_error";
  }
  return "?";
}

MistakeLabel parse_mistake_label(std::string_view text) {
  for (auto l : {MistakeLabel::Correct, MistakeLabel::WrongEditDescription, MistakeLabel::WrongEditReason,
                 MistakeLabel::WrongErrorType, MistakeLabel::HallucinatedError, MistakeLabel::MissingError}) {
    if (to_string(l) == text) return l;
  }
  throw DataError("unknown annotation label '" + std::string(text) + "'");
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (utf8::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      AnnotationRecord r;
      r.pair_id = j.at("pair_id").is_string() ? j.at("pair_id").get<std::string>() : j.at("pair_id").dump();
      if (j.contains("annotator") && !j["annotator"].is_null()) r.annotator = j["annotator"].get<std::string>();
      if (j.contains("explanation_index") && !j["explanation_index"].is_null()) {
        r.explanation_index = j["explanation_index"].get<std::size_t>();
      }
      r.label = parse_mistake_label(j.at("label").get<std::string>());
      if (r.label != MistakeLabel::MissingError && !r.explanation_index) {
        throw DataError("label " + std::string(to_string(r.label)) + " needs an explanation_index");
      }
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::string format_percent(double value) {
  char buf[32];
  // Halves round away from zero (78/96 prints as 81.3%, not 81.2%).
  const double rounded = std::round(value * 10.0 + (value >= 0 ? 1e-9 : -1e-9)) / 10.0;
  std::snprintf(buf, sizeof buf, "%.1f%%", rounded);
  return buf;
}

double Agreement::rate() const {
  return total() == 0 ? 0.0 : static_cast<double>(fully_agree + disagree_missing) / static_cast<double>(total());
}

double Agreement::fully_agree_rate() const {
  return total() == 0 ? 0.0 : static_cast<double>(fully_agree) / static_cast<double>(total());
}

double AnnotationSummary::percentage(MistakeLabel label) const {
  auto it = counts.find(label);
  return percent(it == counts.end() ? 0 : it->second, explanations);
}

AnnotationSummary aggregate_annotations(std::span<const AnnotationRecord> records,
                                        const std::optional<std::set<std::string>>& dual_ids) {
  AnnotationSummary s;
  for (auto l : {MistakeLabel::Correct, MistakeLabel::WrongEditDescription, MistakeLabel::WrongEditReason,
                 MistakeLabel::WrongErrorType, MistakeLabel::HallucinatedError}) {
    s.counts[l] = 0;
  }
  std::set<std::pair<std::string, std::string>> items;
  std::set<std::tuple<std::string, std::string, std::size_t>> labelled;
  // pair -> annotator -> (explanation mistakes, missing count)
  struct View {
    std::multiset<std::pair<std::size_t, MistakeLabel>> mistakes;
    std::size_t missing = 0;
  };
  std::map<std::string, std::map<std::string, View>> views;
  for (const auto& r : records) {
    items.emplace(r.pair_id, r.annotator);
    auto& view = views[r.pair_id][r.annotator];
    if (r.label == MistakeLabel::MissingError) {
      ++s.missing_errors;
      ++view.missing;
      continue;
    }
    if (!labelled.emplace(r.pair_id, r.annotator, *r.explanation_index).second) {
      throw DataError("pair '" + r.pair_id + "' explanation " + std::to_string(*r.explanation_index) +
                      " labelled twice by annotator '" + r.annotator + "'");
    }
    ++s.counts[r.label];
    ++s.explanations;
    if (r.label != MistakeLabel::Correct) view.mistakes.emplace(*r.explanation_index, r.label);
  }
  s.items = items.size();
  if (dual_ids) {
    Agreement a;
    for (const auto& id : *dual_ids) {
      auto it = views.find(id);
      if (it == views.end() || it->second.size() != 2) {
        throw DataError("dual-annotated pair '" + id + "' needs exactly two annotators");
      }
      const auto& first = it->second.begin()->second;
      const auto& second = std::next(it->second.begin())->second;
      if (first.mistakes != second.mistakes) {
        ++a.disagree_other;
      } else if (first.missing != second.missing) {
        ++a.disagree_missing;
      } else {
        ++a.fully_agree;
      }
    }
    s.agreement = a;
  }
  return s;
}

}  // namespace gee
