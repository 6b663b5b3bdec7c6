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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gee/atomic.hpp"
#include "gee/corpus.hpp"
#include "gee/explanation.hpp"
#include "json.hpp"

namespace gee {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Zero denominators give 0.
Prf prf(std::size_t tp, std::size_t fp, std::size_t fn);
double f1_from_pr(double precision, double recall);

enum class ReviewStatus { ExactMatch, FeasibleUnmatched, Infeasible };

std::string_view to_string(ReviewStatus status);

struct ReviewItem {
  std::string pair_id;
  AtomicEdit edit;
  ReviewStatus status = ReviewStatus::ExactMatch;
  // Set once an adjudication accepted the edit as a true positive.
  bool adjudicated = false;
};

struct EditMatchReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ReviewItem> review_queue;

  // Recomputes the rates from the counts.
  void refresh();
  // Reports add component-wise; rates are refreshed.
  EditMatchReport& operator+=(const EditMatchReport& other);
};

// Greedy multiset matching on (op, orig, tgt). Unmatched predictions are
// queued as feasible_unmatched when the whole predicted list rebuilds the
// target, otherwise as infeasible. Throws DataError when the gold list itself
// does not rebuild the target.
EditMatchReport match_edits(std::span<const AtomicEdit> predicted, std::span<const AtomicEdit> gold,
                            const SentencePair& pair, const Tokenizer& tokenizer);

struct Adjudication {
  std::string pair_id;
  AtomicEdit edit;
  bool accept = false;
};

// JSONL of {"pair_id", "edit": [op, orig, tgt], "verdict": "accept" | "reject"}.
std::vector<Adjudication> load_adjudications(const std::filesystem::path& path);

// Each accepted verdict flips one matching feasible_unmatched item from fp to
// tp. fn is left alone: the gold edit that was decomposed differently stays
// unmatched. Verdicts matching nothing raise a warning.
void apply_adjudications(EditMatchReport& report, std::span<const Adjudication> verdicts);

// A quoted edit mention pulled out of an explanation's edit description.
struct Mention {
  EditOp op = EditOp::Replace;
  std::string orig;
  std::string tgt;
};

// Finds mentions of the forms 'X' is replaced by/with 'Y', 'X' is inserted,
// 'X' is deleted, 'X' is relocated (and close variants) in any quote style.
std::vector<Mention> extract_mentions(std::string_view edit_desc);

struct Hallucination {
  std::size_t explanation = 0;
  Mention mention;
};

struct CoverageReport {
  // (edit index, explanation index)
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  std::vector<std::size_t> missing_edits;
  std::vector<Hallucination> hallucinated;
  // Explanations that name no recognizable edit at all.
  std::vector<std::size_t> unresolved;
  std::size_t total_edits = 0;
  double coverage_rate = 1.0;
};

// Links explanations to edits one to one, best overlap first. A mention that
// corresponds to no edit marks its explanation as hallucinated.
CoverageReport coverage(std::span<const AtomicEdit> edits, std::span<const Explanation> explanations,
                        const SentencePair& pair);

enum class MistakeLabel {
  Correct,
  WrongEditDescription,
  WrongEditReason,
  WrongErrorType,
  HallucinatedError,
  MissingError,
};

std::string_view to_string(MistakeLabel label);
// Throws DataError for unknown labels.
MistakeLabel parse_mistake_label(std::string_view text);

// One judgement: a label for one explanation, or a missing_error note.
struct AnnotationRecord {
  std::string pair_id;
  std::string annotator;
  std::optional<std::size_t> explanation_index;
  MistakeLabel label = MistakeLabel::Correct;
};

// JSONL of {"pair_id", "annotator"?, "explanation_index"?, "label"}.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

struct Agreement {
  std::size_t fully_agree = 0;
  std::size_t disagree_missing = 0;
  std::size_t disagree_other = 0;

  std::size_t total() const noexcept { return fully_agree + disagree_missing + disagree_other; }
  // Fully agree plus disagree-on-missing, over all compared pairs.
  double rate() const;
  double fully_agree_rate() const;
};

struct AnnotationSummary {
  // Every explanation label except missing_error.
  std::map<MistakeLabel, std::size_t> counts;
  std::size_t explanations = 0;
  // Distinct (pair, annotator) combinations.
  std::size_t items = 0;
  std::size_t missing_errors = 0;
  std::optional<Agreement> agreement;

  // 100 * count / explanations, from the counts, 0 when there are none.
  double percentage(MistakeLabel label) const;
};

// Tallies all records. Pairs in `dual_ids` must carry exactly two annotators
// and are compared for agreement. Throws DataError on unknown labels or two
// labels for one explanation.
AnnotationSummary aggregate_annotations(std::span<const AnnotationRecord> records,
                                        const std::optional<std::set<std::string>>& dual_ids = std::nullopt);

// 100 * part / whole, 0 when whole is 0.
double percent(std::size_t part, std::size_t whole);
// One decimal, halves rounded away from zero, e.g. "93.9%".
std::string format_percent(double value);

}  // namespace gee
