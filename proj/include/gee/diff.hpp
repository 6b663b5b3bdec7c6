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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gee/tokenize.hpp"

namespace gee {

// Half-open token index range.
struct Span {
  std::size_t lo = 0;
  std::size_t hi = 0;

  std::size_t size() const noexcept { return hi - lo; }
  bool empty() const noexcept { return hi == lo; }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class EditOp { Insert, Delete, Replace, Relocate };

std::string_view to_string(EditOp op);

enum class OpcodeTag { Equal, Insert, Delete, Replace };

std::string_view to_string(OpcodeTag tag);

struct Opcode {
  OpcodeTag tag = OpcodeTag::Equal;
  Span src;
  Span tgt;
  friend bool operator==(const Opcode&, const Opcode&) = default;
};

struct MatchBlock {
  std::size_t src = 0;
  std::size_t tgt = 0;
  std::size_t len = 0;
  friend bool operator==(const MatchBlock&, const MatchBlock&) = default;
};

// Longest common contiguous run of a[a_lo, a_hi) and b[b_lo, b_hi). Ties go
// to the leftmost source start, then the leftmost target start. len == 0 when
// the ranges share no token.
MatchBlock longest_match(std::span<const std::string> a, std::span<const std::string> b,
                         Span a_range, Span b_range);

// One recursion step of the matcher, recorded for inspection.
struct MatchStep {
  Span src;
  Span tgt;
  MatchBlock chosen;
};

// Recursive longest-match alignment. Opcodes are contiguous, exhaustive, and
// never hold two adjacent Equal runs. `trace`, when given, receives every
// recursion step in visiting order.
std::vector<Opcode> opcodes(std::span<const std::string> src, std::span<const std::string> tgt,
                            std::vector<MatchStep>* trace = nullptr);
std::vector<Opcode> opcodes(const TokenSeq& src, const TokenSeq& tgt);

// A maximal edited span (a "rough" edit) fed to the extractor.
struct CoarseEdit {
  EditOp op = EditOp::Replace;  // Insert, Delete or Replace
  std::string orig_text;
  std::string tgt_text;
  Span src;
  Span tgt;
  friend bool operator==(const CoarseEdit&, const CoarseEdit&) = default;
};

std::vector<CoarseEdit> coarse_edits(const TokenSeq& src, const TokenSeq& tgt);

// ('replace', 'a b', 'c') for German, ("replace", "ab", "c") for Chinese.
std::string format_coarse_edit(const CoarseEdit& edit, Lang lang);
std::string format_coarse_edits(std::span<const CoarseEdit> edits, Lang lang);

}  // namespace gee
