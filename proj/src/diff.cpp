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

#include "gee/diff.hpp"

#include <functional>

namespace gee {

std::string_view to_string(EditOp op) {
  switch (op) {
    case EditOp::Insert:
      return "insert";
    case EditOp::Delete:
      return "delete";
    case EditOp::Replace:
      return "replace";
    case EditOp::Relocate:
      return "relocate";
  }
  return "?";
}

std::string_view to_string(OpcodeTag tag) {
  switch (tag) {
    case OpcodeTag::Equal:
      return "equal";
    case OpcodeTag::Insert:
      return "insert";
    case OpcodeTag::Delete:
      return "delete";
    case OpcodeTag::Replace:
      return "replace";
  }
  return "?";
}

MatchBlock longest_match(std::span<const std::string> a, std::span<const std::string> b,
                         Span a_range, Span b_range) {
  MatchBlock best{a_range.lo, b_range.lo, 0};
  const std::size_t width = b_range.size();
  // run[j] = length of the common run ending at (i, b_range.lo + j).
  std::vector<std::size_t> prev(width + 1, 0);
  std::vector<std::size_t> cur(width + 1, 0);
  for (std::size_t i = a_range.lo; i < a_range.hi; ++i) {
    for (std::size_t jj = 0; jj < width; ++jj) {
      const std::size_t j = b_range.lo + jj;
      cur[jj + 1] = a[i] == b[j] ? prev[jj] + 1 : 0;
      const std::size_t len = cur[jj + 1];
      if (len == 0) continue;
      const std::size_t start_a = i + 1 - len;
      const std::size_t start_b = j + 1 - len;
      if (len > best.len || (len == best.len && (start_a < best.src ||
                                                 (start_a == best.src && start_b < best.tgt)))) {
        best = {start_a, start_b, len};
      }
    }
    std::swap(prev, cur);
    std::fill(cur.begin(), cur.end(), 0);
  }
  return best;
}

std::vector<Opcode> opcodes(std::span<const std::string> src, std::span<const std::string> tgt,
                            std::vector<MatchStep>* trace) {
  std::vector<MatchBlock> blocks;
  std::function<void(Span, Span)> recurse = [&](Span a, Span b) {
    if (a.empty() || b.empty()) return;
    const auto m = longest_match(src, tgt, a, b);
    if (trace != nullptr) trace->push_back({a, b, m});
    if (m.len == 0) return;
    recurse({a.lo, m.src}, {b.lo, m.tgt});
    blocks.push_back(m);
    recurse({m.src + m.len, a.hi}, {m.tgt + m.len, b.hi});
  };
  recurse({0, src.size()}, {0, tgt.size()});

  std::vector<Opcode> out;
  std::size_t i = 0;
  std::size_t j = 0;
  auto emit_gap = [&](std::size_t i_end, std::size_t j_end) {
    if (i < i_end && j < j_end) {
      out.push_back({OpcodeTag::Replace, {i, i_end}, {j, j_end}});
    } else if (i < i_end) {
      out.push_back({OpcodeTag::Delete, {i, i_end}, {j, j}});
    } else if (j < j_end) {
      out.push_back({OpcodeTag::Insert, {i, i}, {j, j_end}});
    }
  };
  for (const auto& m : blocks) {
    emit_gap(m.src, m.tgt);
    if (!out.empty() && out.back().tag == OpcodeTag::Equal && out.back().src.hi == m.src &&
        out.back().tgt.hi == m.tgt) {
      out.back().src.hi += m.len;
      out.back().tgt.hi += m.len;
    } else {
      out.push_back({OpcodeTag::Equal, {m.src, m.src + m.len}, {m.tgt, m.tgt + m.len}});
    }
    i = m.src + m.len;
    j = m.tgt + m.len;
  }
  emit_gap(src.size(), tgt.size());
  return out;
}

std::vector<Opcode> opcodes(const TokenSeq& src, const TokenSeq& tgt) {
  const auto a = src.texts();
  const auto b = tgt.texts();
  return opcodes(a, b);
}

std::vector<CoarseEdit> coarse_edits(const TokenSeq& src, const TokenSeq& tgt) {
  std::vector<CoarseEdit> out;
  Span pending_src;
  Span pending_tgt;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    CoarseEdit e;
    e.src = pending_src;
    e.tgt = pending_tgt;
    e.op = pending_src.empty()   ? EditOp::Insert
           : pending_tgt.empty() ? EditOp::Delete
                                 : EditOp::Replace;
    e.orig_text = join_tokens(src, pending_src.lo, pending_src.hi);
    e.tgt_text = join_tokens(tgt, pending_tgt.lo, pending_tgt.hi);
    out.push_back(std::move(e));
    open = false;
  };
  for (const auto& op : opcodes(src, tgt)) {
    if (op.tag == OpcodeTag::Equal) {
      flush();
      continue;
    }
    if (!open) {
      pending_src = op.src;
      pending_tgt = op.tgt;
      open = true;
    } else {
      pending_src.hi = op.src.hi;
      pending_tgt.hi = op.tgt.hi;
    }
  }
  flush();
  return out;
}

namespace {

// Python repr() of a str, enough for prompt text: prefer single quotes, switch
// to double quotes when the text holds a single quote but no double quote.
std::string py_repr(std::string_view text) {
  const bool has_single = text.find('\'') != std::string_view::npos;
  const bool has_double = text.find('"') != std::string_view::npos;
  const char q = (has_single && !has_double) ? '"' : '\'';
  std::string out(1, q);
  for (char c : text) {
    if (c == '\\' || c == q) out += '\\';
    out += c;
  }
  out += q;
  return out;
}

std::string dq(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_coarse_edit(const CoarseEdit& edit, Lang lang) {
  const auto quote = lang == Lang::Zh ? dq : py_repr;
  return "(" + quote(to_string(edit.op)) + ", " + quote(edit.orig_text) + ", " +
         quote(edit.tgt_text) + ")";
}

std::string format_coarse_edits(std::span<const CoarseEdit> edits, Lang lang) {
  std::string out;
  for (std::size_t i = 0; i < edits.size(); ++i) {
    if (i > 0) out += '\n';
    out += format_coarse_edit(edits[i], lang);
  }
  return out;
}

}  // namespace gee
