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

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gee/diff.hpp"
#include "gee/tokenize.hpp"

namespace gee {

// One correction c_i. Text fields hold token runs joined the language's way
// (spaces for German, nothing for Chinese). Spans are optional anchors; edits
// parsed from model output are positionless.
struct AtomicEdit {
  EditOp op = EditOp::Replace;
  std::string orig;
  std::string tgt;
  std::optional<Span> src_span;
  std::optional<Span> tgt_span;

  // Compares (op, orig, tgt) only.
  bool same_triple(const AtomicEdit& other) const {
    return op == other.op && orig == other.orig && tgt == other.tgt;
  }
  friend bool operator==(const AtomicEdit&, const AtomicEdit&) = default;
};

AtomicEdit make_insert(std::string tgt);
AtomicEdit make_delete(std::string orig);
AtomicEdit make_replace(std::string orig, std::string tgt);
AtomicEdit make_relocate(std::string token);

// Empty when `edit` satisfies the op invariants, otherwise the reason.
std::optional<std::string> invariant_violation(const AtomicEdit& edit);

// Code point Levenshtein distance.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

// 1 - distance / max length; 1 for equal strings (including two empties).
double similarity(std::string_view a, std::string_view b);

struct RefinerConfig {
  double similarity_threshold = 0.5;
  bool group_contiguous = false;
  bool zh_particle_merge = true;
  std::set<std::string> particle_list = {"了", "过", "完", "到", "出", "成"};
  // Pair leftover deletes and inserts that sit in the same alignment gap.
  bool pair_colocated = true;

  // Throws ConfigError when out of range.
  void validate() const;
};

// Turns coarse edits into atomic edits. Errors with DataError when a coarse
// span lies outside the token sequences.
std::vector<AtomicEdit> refine(const TokenSeq& src, const TokenSeq& tgt,
                               std::span<const CoarseEdit> coarse, const RefinerConfig& cfg = {});

// coarse_edits() followed by refine().
std::vector<AtomicEdit> extract_rule_based(const TokenSeq& src, const TokenSeq& tgt,
                                           const RefinerConfig& cfg = {});

// Drops identity replaces and empty edits, and removes exact duplicates that
// share the same spans. Order is preserved.
std::vector<AtomicEdit> postprocess(std::vector<AtomicEdit> edits);

enum class Feasibility { Feasible, Infeasible, Undecided };

std::string_view to_string(Feasibility f);

// Where one edit landed. Spans index the search units: tokens for German,
// characters for Chinese. Inserts have an empty src span at their anchor,
// deletes an empty tgt span.
struct EditPlacement {
  std::size_t edit = 0;
  Span src;
  Span tgt;
};

struct FeasibilityResult {
  Feasibility status = Feasibility::Infeasible;
  std::optional<std::string> realized_target;
  std::vector<EditPlacement> assignment;
  std::size_t states_explored = 0;

  bool feasible() const noexcept { return status == Feasibility::Feasible; }
};

struct ApplyOptions {
  std::size_t max_states = 10000;
};

// Searches for a placement of every edit such that executing them on `src`
// yields `tgt` exactly. A relocation must land at a different output
// position than the one it left.
FeasibilityResult apply_edits(const TokenSeq& src, const TokenSeq& tgt,
                              std::span<const AtomicEdit> edits, const ApplyOptions& opts = {});
FeasibilityResult apply_edits(const TokenSeq& src, std::string_view tgt_text,
                              std::span<const AtomicEdit> edits, const Tokenizer& tokenizer,
                              const ApplyOptions& opts = {});

// ["op", "orig", "tgt"] per line.
std::string serialize_edit(const AtomicEdit& edit);
std::string serialize_edits(std::span<const AtomicEdit> edits);

struct ParsedEdits {
  std::vector<AtomicEdit> edits;
  std::vector<std::string> warnings;
};

// Lenient reader for model replies. Throws DataError carrying the raw text
// when non-blank input yields no edit line at all.
ParsedEdits parse_edit_lines(std::string_view text);

// Source-order sort: by source anchor, inserts before other ops at the same
// anchor, then by target anchor. Edits without spans keep their relative order
// after all anchored edits.
void sort_edits(std::vector<AtomicEdit>& edits);

}  // namespace gee
