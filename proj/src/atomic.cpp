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

#include "gee/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_set>

#include "gee/error.hpp"
#include "gee/utf8.hpp"

namespace gee {

AtomicEdit make_insert(std::string tgt) { return {EditOp::Insert, "", std::move(tgt), {}, {}}; }
AtomicEdit make_delete(std::string orig) { return {EditOp::Delete, std::move(orig), "", {}, {}}; }
AtomicEdit make_replace(std::string orig, std::string tgt) {
  return {EditOp::Replace, std::move(orig), std::move(tgt), {}, {}};
}
AtomicEdit make_relocate(std::string token) {
  auto copy = token;
  return {EditOp::Relocate, std::move(token), std::move(copy), {}, {}};
}

std::optional<std::string> invariant_violation(const AtomicEdit& e) {
  switch (e.op) {
    case EditOp::Insert:
      if (!e.orig.empty()) return "insert with non-empty original";
      if (e.tgt.empty()) return "insert with empty target";
      break;
    case EditOp::Delete:
      if (!e.tgt.empty()) return "delete with non-empty target";
      if (e.orig.empty()) return "delete with empty original";
      break;
    case EditOp::Replace:
      if (e.orig.empty() || e.tgt.empty()) return "replace with an empty side";
      if (e.orig == e.tgt) return "replace with identical sides";
      break;
    case EditOp::Relocate:
      if (e.orig.empty()) return "relocate with empty token";
      if (e.orig != e.tgt) return "relocate with differing sides";
      break;
  }
  return std::nullopt;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double similarity(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  const auto ua = utf8::decode(a);
  const auto ub = utf8::decode(b);
  const auto longest = std::max(ua.size(), ub.size());
  if (ua.empty() || ub.empty()) return 0.0;
  return 1.0 - static_cast<double>(edit_distance(ua, ub)) / static_cast<double>(longest);
}

void RefinerConfig::validate() const {
  if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0)) {
    throw ConfigError("similarity_threshold must lie in [0, 1]");
  }
}

// --- refine --------------------------------------------------------------------

namespace {

enum class Step { Match, Sub, Del, Ins, Reloc };

struct Item {
  Step kind;
  Span src;  // empty at the anchor for Ins
  Span tgt;  // empty at the anchor for Del
};

constexpr double kEps = 1e-9;

class Aligner {
 public:
  Aligner(const TokenSeq& s, const TokenSeq& t, Span a, Span b, const RefinerConfig& cfg)
      : s_(s), t_(t), a_(a), b_(b), thr_(cfg.similarity_threshold) {}

  std::vector<Item> run() {
    const std::size_t n = a_.size();
    const std::size_t m = b_.size();
    dp_.assign((n + 1) * (m + 1), std::numeric_limits<double>::infinity());
    at(0, 0) = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j <= m; ++j) {
        if (i == 0 && j == 0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : candidates(i, j)) best = std::min(best, at(i - c.di, j - c.dj) + c.cost);
        at(i, j) = best;
      }
    }
    std::vector<Item> items;
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0) {
      bool moved = false;
      for (const auto& c : candidates(i, j)) {
        if (std::abs(at(i - c.di, j - c.dj) + c.cost - at(i, j)) > kEps) continue;
        const std::size_t si = a_.lo + i;
        const std::size_t tj = b_.lo + j;
        items.push_back({c.step, {si - c.di, si}, {tj - c.dj, tj}});
        i -= c.di;
        j -= c.dj;
        moved = true;
        break;
      }
      if (!moved) throw std::logic_error("alignment backtrace lost its path");
    }
    std::reverse(items.begin(), items.end());
    return items;
  }

 private:
  struct Cand {
    Step step;
    std::size_t di;
    std::size_t dj;
    double cost;
  };

  double& at(std::size_t i, std::size_t j) { return dp_[i * (b_.size() + 1) + j]; }

  const std::string& src_tok(std::size_t i) const { return s_[a_.lo + i]; }
  const std::string& tgt_tok(std::size_t j) const { return t_[b_.lo + j]; }

  // Substitution is allowed only between tokens of the same class (word vs
  // punctuation) whose similarity clears the threshold.
  std::optional<double> sub_sim(const std::string& x, const std::string& y) const {
    if (utf8::all_punct(x) != utf8::all_punct(y)) return std::nullopt;
    const double sim = similarity(x, y);
    if (sim > thr_) return sim;
    return std::nullopt;
  }

  // One token against two: the pair is compared glued together. The group must
  // beat each single-token pairing, and punctuation never joins a group.
  std::optional<double> group_sim(const std::string& one, const std::string& x,
                                  const std::string& y) const {
    if (utf8::all_punct(one) || utf8::all_punct(x) || utf8::all_punct(y)) return std::nullopt;
    const double sim = similarity(one, x + y);
    if (sim <= thr_) return std::nullopt;
    if (sim <= similarity(one, x) || sim <= similarity(one, y)) return std::nullopt;
    return sim;
  }

  std::vector<Cand> candidates(std::size_t i, std::size_t j) const {
    std::vector<Cand> out;
    if (i > 0 && j > 0) {
      const auto& x = src_tok(i - 1);
      const auto& y = tgt_tok(j - 1);
      if (x == y) {
        out.push_back({Step::Match, 1, 1, 0.0});
      } else if (auto sim = sub_sim(x, y)) {
        out.push_back({Step::Sub, 1, 1, 1.0 - *sim});
      }
    }
    if (i > 0 && j > 1) {
      if (auto sim = group_sim(src_tok(i - 1), tgt_tok(j - 2), tgt_tok(j - 1))) {
        out.push_back({Step::Sub, 1, 2, 1.0 - *sim});
      }
    }
    if (i > 1 && j > 0) {
      if (auto sim = group_sim(tgt_tok(j - 1), src_tok(i - 2), src_tok(i - 1))) {
        out.push_back({Step::Sub, 2, 1, 1.0 - *sim});
      }
    }
    if (i > 0) out.push_back({Step::Del, 1, 0, thr_});
    if (j > 0) out.push_back({Step::Ins, 0, 1, thr_});
    return out;
  }

  const TokenSeq& s_;
  const TokenSeq& t_;
  Span a_;
  Span b_;
  double thr_;
  std::vector<double> dp_;
};

std::string src_text(const TokenSeq& s, Span sp) { return join_tokens(s, sp.lo, sp.hi); }

// Within each run of unaligned tokens between two aligned pairs, turn
// delete/insert pairs of differing text into replacements, best similarity
// first. Words pair with words and punctuation with punctuation.
void pair_colocated(std::vector<Item>& items, const TokenSeq& s, const TokenSeq& t) {
  std::vector<Item> out;
  std::size_t k = 0;
  while (k < items.size()) {
    if (items[k].kind != Step::Del && items[k].kind != Step::Ins) {
      out.push_back(items[k++]);
      continue;
    }
    std::size_t end = k;
    while (end < items.size() && (items[end].kind == Step::Del || items[end].kind == Step::Ins)) {
      ++end;
    }
    std::vector<Item> dels;
    std::vector<Item> ins;
    for (std::size_t q = k; q < end; ++q) (items[q].kind == Step::Del ? dels : ins).push_back(items[q]);
    std::vector<bool> del_used(dels.size(), false);
    std::vector<bool> ins_used(ins.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> taken;
    // Pairs must not cross: a replacement cannot also reorder.
    auto crosses = [&](std::size_t d, std::size_t q) {
      return std::any_of(taken.begin(), taken.end(),
                         [&](const auto& p) { return (d < p.first) != (q < p.second); });
    };
    for (;;) {
      double best = -1.0;
      std::size_t bd = 0;
      std::size_t bi = 0;
      for (std::size_t d = 0; d < dels.size(); ++d) {
        if (del_used[d]) continue;
        const auto dt = src_text(s, dels[d].src);
        for (std::size_t q = 0; q < ins.size(); ++q) {
          if (ins_used[q] || crosses(d, q)) continue;
          const auto it = join_tokens(t, ins[q].tgt.lo, ins[q].tgt.hi);
          if (dt == it || utf8::all_punct(dt) != utf8::all_punct(it)) continue;
          const double sim = similarity(dt, it);
          if (sim > best + kEps) {
            best = sim;
            bd = d;
            bi = q;
          }
        }
      }
      if (best < 0.0) break;
      del_used[bd] = true;
      ins_used[bi] = true;
      taken.emplace_back(bd, bi);
      out.push_back({Step::Sub, dels[bd].src, ins[bi].tgt});
    }
    for (std::size_t d = 0; d < dels.size(); ++d) {
      if (!del_used[d]) out.push_back(dels[d]);
    }
    for (std::size_t q = 0; q < ins.size(); ++q) {
      if (!ins_used[q]) out.push_back(ins[q]);
    }
    k = end;
  }
  items = std::move(out);
}

// Merges deletes (inserts) at adjacent positions into one multi-token edit.
void group_contiguous(std::vector<Item>& items) {
  for (Step kind : {Step::Del, Step::Ins}) {
    std::vector<Item> same;
    std::vector<Item> rest;
    for (const auto& it : items) (it.kind == kind ? same : rest).push_back(it);
    const bool by_src = kind == Step::Del;
    std::sort(same.begin(), same.end(), [&](const Item& x, const Item& y) {
      return by_src ? x.src.lo < y.src.lo : x.tgt.lo < y.tgt.lo;
    });
    std::vector<Item> merged;
    for (const auto& it : same) {
      if (!merged.empty()) {
        auto& last = merged.back();
        const bool adjacent = by_src ? (last.src.hi == it.src.lo && last.tgt == it.tgt)
                                     : (last.tgt.hi == it.tgt.lo && last.src == it.src);
        if (adjacent) {
          (by_src ? last.src.hi : last.tgt.hi) = by_src ? it.src.hi : it.tgt.hi;
          continue;
        }
      }
      merged.push_back(it);
    }
    rest.insert(rest.end(), merged.begin(), merged.end());
    items = std::move(rest);
  }
}

// Fuses a delete and an insert of identical text into a relocation, but only
// when that text has exactly one unmatched deletion and one unmatched insertion.
void fuse_relocations(std::vector<Item>& items, const TokenSeq& s, const TokenSeq& t) {
  std::map<std::string, std::vector<std::size_t>> dels;
  std::map<std::string, std::vector<std::size_t>> ins;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k].kind == Step::Del) dels[src_text(s, items[k].src)].push_back(k);
    if (items[k].kind == Step::Ins) ins[join_tokens(t, items[k].tgt.lo, items[k].tgt.hi)].push_back(k);
  }
  std::vector<bool> drop(items.size(), false);
  std::vector<Item> fused;
  for (const auto& [text, ds] : dels) {
    auto it = ins.find(text);
    if (it == ins.end() || ds.size() != 1 || it->second.size() != 1) continue;
    const auto& d = items[ds.front()];
    const auto& q = items[it->second.front()];
    fused.push_back({Step::Reloc, d.src, q.tgt});
    drop[ds.front()] = true;
    drop[it->second.front()] = true;
  }
  std::vector<Item> out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (!drop[k]) out.push_back(items[k]);
  }
  out.insert(out.end(), fused.begin(), fused.end());
  items = std::move(out);
}

// Chinese verb + particle: a replace that swaps only a particle absorbs the
// unchanged verb before it; a replace of the verb absorbs the unchanged
// particle after it.
void merge_particles(std::vector<Item>& items, const TokenSeq& s, const TokenSeq& t,
                     const std::set<std::string>& particles) {
  std::map<std::size_t, std::size_t> match_at;  // src index -> item index
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k].kind == Step::Match) {
      for (std::size_t q = 0; q < items[k].src.size(); ++q) match_at[items[k].src.lo + q] = k;
    }
  }
  auto is_particle = [&](const std::string& x) { return particles.count(x) > 0; };
  // Unchanged single-token pair at (si, tj), still available.
  auto unchanged = [&](std::size_t si, std::size_t tj) {
    auto it = match_at.find(si);
    if (it == match_at.end()) return false;
    const auto& m = items[it->second];
    return tj >= m.tgt.lo && tj - m.tgt.lo == si - m.src.lo;
  };
  std::set<std::size_t> absorbed;
  for (auto& it : items) {
    if (it.kind != Step::Sub || it.src.size() != 1 || it.tgt.size() != 1) continue;
    const auto& o = s[it.src.lo];
    const auto& g = t[it.tgt.lo];
    if (is_particle(o) && is_particle(g)) {
      if (it.src.lo == 0 || it.tgt.lo == 0) continue;
      const std::size_t si = it.src.lo - 1;
      const std::size_t tj = it.tgt.lo - 1;
      if (!unchanged(si, tj) || absorbed.count(si) > 0 || is_particle(s[si])) continue;
      absorbed.insert(si);
      it.src.lo = si;
      it.tgt.lo = tj;
    } else if (!is_particle(o) && !is_particle(g)) {
      const std::size_t si = it.src.hi;
      const std::size_t tj = it.tgt.hi;
      if (si >= s.size() || tj >= t.size()) continue;
      if (!unchanged(si, tj) || absorbed.count(si) > 0 || !is_particle(s[si])) continue;
      absorbed.insert(si);
      it.src.hi = si + 1;
      it.tgt.hi = tj + 1;
    }
  }
}

}  // namespace

std::vector<AtomicEdit> refine(const TokenSeq& src, const TokenSeq& tgt,
                               std::span<const CoarseEdit> coarse, const RefinerConfig& cfg) {
  cfg.validate();
  if (coarse.empty()) return {};
  Span a{src.size(), 0};
  Span b{tgt.size(), 0};
  for (const auto& c : coarse) {
    if (c.src.lo > c.src.hi || c.src.hi > src.size() || c.tgt.lo > c.tgt.hi ||
        c.tgt.hi > tgt.size()) {
      throw DataError("coarse edit span out of bounds");
    }
    a.lo = std::min(a.lo, c.src.lo);
    a.hi = std::max(a.hi, c.src.hi);
    b.lo = std::min(b.lo, c.tgt.lo);
    b.hi = std::max(b.hi, c.tgt.hi);
  }
  a.hi = std::max(a.hi, a.lo);
  b.hi = std::max(b.hi, b.lo);

  auto items = Aligner(src, tgt, a, b, cfg).run();
  if (cfg.pair_colocated) pair_colocated(items, src, tgt);
  if (cfg.group_contiguous) group_contiguous(items);
  fuse_relocations(items, src, tgt);
  if (src.lang == Lang::Zh && cfg.zh_particle_merge) merge_particles(items, src, tgt, cfg.particle_list);

  std::vector<AtomicEdit> out;
  for (const auto& it : items) {
    AtomicEdit e;
    e.src_span = it.src;
    e.tgt_span = it.tgt;
    switch (it.kind) {
      case Step::Match:
        continue;
      case Step::Sub:
        e.op = EditOp::Replace;
        e.orig = src_text(src, it.src);
        e.tgt = join_tokens(tgt, it.tgt.lo, it.tgt.hi);
        break;
      case Step::Del:
        e.op = EditOp::Delete;
        e.orig = src_text(src, it.src);
        break;
      case Step::Ins:
        e.op = EditOp::Insert;
        e.tgt = join_tokens(tgt, it.tgt.lo, it.tgt.hi);
        break;
      case Step::Reloc:
        e.op = EditOp::Relocate;
        e.orig = src_text(src, it.src);
        e.tgt = e.orig;
        break;
    }
    out.push_back(std::move(e));
  }
  out = postprocess(std::move(out));
  sort_edits(out);
  return out;
}

std::vector<AtomicEdit> extract_rule_based(const TokenSeq& src, const TokenSeq& tgt,
                                           const RefinerConfig& cfg) {
  const auto coarse = coarse_edits(src, tgt);
  return refine(src, tgt, coarse, cfg);
}

std::vector<AtomicEdit> postprocess(std::vector<AtomicEdit> edits) {
  std::vector<AtomicEdit> out;
  out.reserve(edits.size());
  for (auto& e : edits) {
    if (e.orig.empty() && e.tgt.empty()) continue;
    if (e.op == EditOp::Replace && e.orig == e.tgt) continue;
    const bool anchored = e.src_span.has_value() || e.tgt_span.has_value();
    if (anchored && std::find(out.begin(), out.end(), e) != out.end()) continue;
    out.push_back(std::move(e));
  }
  return out;
}

void sort_edits(std::vector<AtomicEdit>& edits) {
  auto key = [](const AtomicEdit& e) {
    const bool anchored = e.src_span.has_value();
    const std::size_t s = anchored ? e.src_span->lo : 0;
    const int rank = e.op == EditOp::Insert ? 0 : 1;
    const std::size_t t = e.tgt_span ? e.tgt_span->lo : 0;
    return std::make_tuple(anchored ? 0 : 1, s, rank, t);
  };
  std::stable_sort(edits.begin(), edits.end(),
                   [&](const AtomicEdit& x, const AtomicEdit& y) { return key(x) < key(y); });
}

std::string_view to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible:
      return "feasible";
    case Feasibility::Infeasible:
      return "infeasible";
    case Feasibility::Undecided:
      return "undecided";
  }
  return "?";
}

}  // namespace gee

// --- feasibility search ---------------------------------------------------------

namespace gee {
namespace {

// German searches over tokens. Chinese searches over characters so that edit
// texts are immune to segmentation differences.
std::vector<std::string> search_units(const TokenSeq& seq) {
  if (seq.lang == Lang::De) return seq.texts();
  std::vector<std::string> out;
  for (const auto& tok : seq.tokens) {
    for (auto& cp : utf8::split_code_points(utf8::strip_space(tok.text))) out.push_back(std::move(cp));
  }
  return out;
}

// Edit texts are token runs joined by spaces, so German splits on whitespace.
std::vector<std::string> edit_units(const std::string& text, Lang lang) {
  if (lang == Lang::De) {
    std::vector<std::string> out;
    std::string cur;
    for (char32_t cp : utf8::decode(text)) {
      if (utf8::is_space(cp)) {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += utf8::encode(cp);
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }
  return utf8::split_code_points(utf8::strip_space(text));
}

struct Kind {
  EditOp op;
  std::vector<std::string> orig;
  std::vector<std::string> tgt;
  std::vector<std::size_t> members;
};

struct Pending {
  std::size_t kind;
  bool removed;      // true: removal done, placement outstanding
  std::size_t j;     // output position right after the executed half
  std::size_t member;
  Span done;         // span of the executed half
};

class Search {
 public:
  Search(std::vector<std::string> s, std::vector<std::string> t, std::vector<Kind> kinds,
         std::size_t cap)
      : s_(std::move(s)), t_(std::move(t)), kinds_(std::move(kinds)), cap_(cap) {
    for (const auto& k : kinds_) {
      remaining_.push_back(k.members.size());
      used_.push_back(0);
      src_at_.push_back(match_table(s_, k.orig));
      tgt_at_.push_back(match_table(t_, k.tgt));
    }
  }

  bool run() { return dfs(); }
  bool capped() const noexcept { return capped_; }
  std::size_t explored() const noexcept { return explored_; }
  std::vector<EditPlacement> placements() const { return path_; }

 private:
  static std::vector<char> match_table(const std::vector<std::string>& seq,
                                       const std::vector<std::string>& pat) {
    std::vector<char> at(seq.size() + 1, 0);
    if (pat.empty()) return at;
    for (std::size_t p = 0; p + pat.size() <= seq.size(); ++p) {
      at[p] = std::equal(pat.begin(), pat.end(), seq.begin() + static_cast<std::ptrdiff_t>(p));
    }
    return at;
  }

  std::string key() const {
    std::string k;
    auto put = [&](std::size_t v) { k.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put(i_);
    put(j_);
    for (auto r : remaining_) put(r);
    std::vector<std::tuple<std::size_t, bool, std::size_t>> pend;
    for (const auto& p : pending_) pend.emplace_back(p.kind, p.removed, p.j);
    std::sort(pend.begin(), pend.end());
    for (const auto& [kind, removed, j] : pend) {
      put(kind);
      put(removed ? 1 : 0);
      put(j);
    }
    return k;
  }

  // Output length still to be produced must equal what is left of the target.
  bool length_consistent() const {
    long long out = static_cast<long long>(s_.size() - i_);
    for (std::size_t k = 0; k < kinds_.size(); ++k) {
      const auto r = static_cast<long long>(remaining_[k]);
      const auto o = static_cast<long long>(kinds_[k].orig.size());
      const auto g = static_cast<long long>(kinds_[k].tgt.size());
      switch (kinds_[k].op) {
        case EditOp::Insert:
          out += r * g;
          break;
        case EditOp::Delete:
          out -= r * o;
          break;
        case EditOp::Replace:
          out += r * (g - o);
          break;
        case EditOp::Relocate:
          break;
      }
    }
    for (const auto& p : pending_) {
      const auto len = static_cast<long long>(kinds_[p.kind].orig.size());
      out += p.removed ? len : -len;
    }
    return out == static_cast<long long>(t_.size() - j_);
  }

  bool done() const {
    if (!pending_.empty()) return false;
    return std::all_of(remaining_.begin(), remaining_.end(), [](std::size_t r) { return r == 0; });
  }

  std::size_t next_member(std::size_t k) { return kinds_[k].members[used_[k]++]; }

  bool dfs() {
    if (explored_ >= cap_) {
      capped_ = true;
      return false;
    }
    ++explored_;
    if (done()) {
      return s_.size() - i_ == t_.size() - j_ &&
             std::equal(s_.begin() + static_cast<std::ptrdiff_t>(i_), s_.end(),
                        t_.begin() + static_cast<std::ptrdiff_t>(j_));
    }
    if (!length_consistent()) return false;
    auto k = key();
    if (failed_.count(k) > 0) return false;
    if (try_moves()) return true;
    if (!capped_) failed_.insert(std::move(k));
    return false;
  }

  bool advance(std::size_t di, std::size_t dj) {
    i_ += di;
    j_ += dj;
    const bool ok = dfs();
    i_ -= di;
    j_ -= dj;
    return ok;
  }

  // Runs one complete edit of kind k consuming di source and dj target units.
  bool apply_whole(std::size_t k, std::size_t di, std::size_t dj) {
    --remaining_[k];
    path_.push_back({next_member(k), {i_, i_ + di}, {j_, j_ + dj}});
    if (advance(di, dj)) return true;
    path_.pop_back();
    --used_[k];
    ++remaining_[k];
    return false;
  }

  bool relocate_half(std::size_t k, bool removal) {
    const std::size_t len = kinds_[k].orig.size();
    const std::size_t di = removal ? len : 0;
    const std::size_t dj = removal ? 0 : len;
    const Span here = removal ? Span{i_, i_ + len} : Span{j_, j_ + len};
    // Finish an outstanding relocation whose other half already ran.
    for (std::size_t p = 0; p < pending_.size(); ++p) {
      const auto pend = pending_[p];
      if (pend.kind != k || pend.removed == removal || pend.j == j_) continue;
      pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(p));
      path_.push_back({pend.member, removal ? here : pend.done, removal ? pend.done : here});
      if (advance(di, dj)) return true;
      path_.pop_back();
      pending_.insert(pending_.begin() + static_cast<std::ptrdiff_t>(p), pend);
      if (capped_) return false;
      break;
    }
    if (remaining_[k] == 0) return false;
    --remaining_[k];
    pending_.push_back({k, removal, removal ? j_ : j_ + len, next_member(k), here});
    if (advance(di, dj)) return true;
    pending_.pop_back();
    --used_[k];
    ++remaining_[k];
    return false;
  }

  bool try_moves() {
    const bool more_src = i_ < s_.size();
    const bool more_tgt = j_ < t_.size();
    if (more_src && more_tgt && s_[i_] == t_[j_]) {
      if (advance(1, 1)) return true;
      if (capped_) return false;
    }
    for (std::size_t k = 0; k < kinds_.size(); ++k) {
      const auto& kind = kinds_[k];
      const bool src_ok = src_at_[k][i_] != 0;
      const bool tgt_ok = tgt_at_[k][j_] != 0;
      bool ok = false;
      switch (kind.op) {
        case EditOp::Delete:
          ok = remaining_[k] > 0 && src_ok && apply_whole(k, kind.orig.size(), 0);
          break;
        case EditOp::Replace:
          ok = remaining_[k] > 0 && src_ok && tgt_ok &&
               apply_whole(k, kind.orig.size(), kind.tgt.size());
          break;
        case EditOp::Insert:
          ok = remaining_[k] > 0 && tgt_ok && apply_whole(k, 0, kind.tgt.size());
          break;
        case EditOp::Relocate:
          ok = (src_ok && relocate_half(k, true)) || (!capped_ && tgt_ok && relocate_half(k, false));
          break;
      }
      if (ok) return true;
      if (capped_) return false;
    }
    return false;
  }

  std::vector<std::string> s_;
  std::vector<std::string> t_;
  std::vector<Kind> kinds_;
  std::size_t cap_;
  std::vector<std::size_t> remaining_;
  std::vector<std::size_t> used_;
  std::vector<std::vector<char>> src_at_;
  std::vector<std::vector<char>> tgt_at_;
  std::vector<Pending> pending_;
  std::vector<EditPlacement> path_;
  std::unordered_set<std::string> failed_;
  std::size_t i_ = 0;
  std::size_t j_ = 0;
  std::size_t explored_ = 0;
  bool capped_ = false;
};

}  // namespace

FeasibilityResult apply_edits(const TokenSeq& src, const TokenSeq& tgt,
                              std::span<const AtomicEdit> edits, const ApplyOptions& opts) {
  FeasibilityResult result;
  const Lang lang = src.lang;
  std::vector<Kind> kinds;
  std::map<std::string, long> balance;
  for (std::size_t e = 0; e < edits.size(); ++e) {
    const auto& edit = edits[e];
    if (invariant_violation(edit)) return result;
    auto it = std::find_if(kinds.begin(), kinds.end(), [&](const Kind& k) {
      return edits[k.members.front()].same_triple(edit);
    });
    if (it == kinds.end()) {
      Kind k{edit.op, edit_units(edit.orig, lang), edit_units(edit.tgt, lang), {}};
      if ((edit.op != EditOp::Insert && k.orig.empty()) || (edit.op != EditOp::Delete && k.tgt.empty())) {
        return result;
      }
      kinds.push_back(std::move(k));
      it = kinds.end() - 1;
    }
    it->members.push_back(e);
    if (edit.op != EditOp::Relocate) {
      for (const auto& u : it->orig) --balance[u];
      for (const auto& u : it->tgt) ++balance[u];
    }
  }

  auto s = search_units(src);
  auto t = search_units(tgt);
  for (const auto& u : s) ++balance[u];
  for (const auto& u : t) --balance[u];
  if (std::any_of(balance.begin(), balance.end(), [](const auto& kv) { return kv.second != 0; })) {
    return result;
  }

  Search search(std::move(s), std::move(t), std::move(kinds), opts.max_states);
  const bool ok = search.run();
  result.states_explored = search.explored();
  if (ok) {
    result.status = Feasibility::Feasible;
    result.realized_target = tgt.has_offsets ? tgt.original : detokenize(tgt);
    result.assignment = search.placements();
    std::sort(result.assignment.begin(), result.assignment.end(),
              [](const EditPlacement& x, const EditPlacement& y) { return x.edit < y.edit; });
  } else if (search.capped()) {
    result.status = Feasibility::Undecided;
  }
  return result;
}

FeasibilityResult apply_edits(const TokenSeq& src, std::string_view tgt_text,
                              std::span<const AtomicEdit> edits, const Tokenizer& tokenizer,
                              const ApplyOptions& opts) {
  return apply_edits(src, tokenizer(tgt_text), edits, opts);
}

// --- serialization ----------------------------------------------------------------

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::optional<EditOp> parse_op(std::string_view raw) {
  std::string op;
  for (char c : utf8::trim(raw)) op += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::map<std::string, EditOp, std::less<>> ops = {
      {"insert", EditOp::Insert},     {"insertion", EditOp::Insert}, {"add", EditOp::Insert},
      {"delete", EditOp::Delete},     {"deletion", EditOp::Delete},  {"remove", EditOp::Delete},
      {"replace", EditOp::Replace},   {"replacement", EditOp::Replace},
      {"substitute", EditOp::Replace}, {"substitution", EditOp::Replace},
      {"relocate", EditOp::Relocate}, {"relocation", EditOp::Relocate}, {"move", EditOp::Relocate},
  };
  auto it = ops.find(op);
  if (it == ops.end()) return std::nullopt;
  return it->second;
}

// Opening quote -> closing quote, both as UTF-8.
std::optional<std::string> closing_quote(std::string_view s, std::size_t pos, std::size_t* width) {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"\"", "\""}, {"'", "'"}, {"`", "`"}, {"“", "”"}, {"„", "“"}, {"‘", "’"}, {"”", "”"}};
  for (const auto& [open, close] : pairs) {
    if (s.substr(pos, open.size()) == open) {
      *width = open.size();
      return close;
    }
  }
  return std::nullopt;
}

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Reads the comma separated items between the brackets. `pos` points just past
// the opening bracket; `close` is ']' or ')'.
std::optional<std::vector<std::string>> read_items(std::string_view s, std::size_t pos, char close) {
  std::vector<std::string> items;
  const std::size_t last_close = s.rfind(close);
  if (last_close == std::string_view::npos || last_close < pos) return std::nullopt;
  auto at_delim = [&](std::size_t p) {
    while (p < s.size() && is_blank(s[p])) ++p;
    return p < s.size() && (s[p] == ',' || s[p] == close);
  };
  for (;;) {
    while (pos < s.size() && is_blank(s[pos])) ++pos;
    if (pos >= s.size()) return std::nullopt;
    if (s[pos] == close) {
      // Trailing comma or empty list.
      break;
    }
    std::size_t width = 0;
    std::string item;
    if (auto cq = closing_quote(s, pos, &width)) {
      std::size_t p = pos + width;
      bool closed = false;
      while (p < s.size()) {
        if (s[p] == '\\' && p + 1 < s.size()) {
          item += s[p + 1];
          p += 2;
          continue;
        }
        if (s.substr(p, cq->size()) == *cq && at_delim(p + cq->size())) {
          p += cq->size();
          closed = true;
          break;
        }
        if (p >= last_close) break;
        item += s[p++];
      }
      if (!closed) {
        // Unterminated quote: runs to the final bracket.
        items.push_back(utf8::trim(item));
        break;
      }
      pos = p;
    } else {
      std::size_t p = pos;
      while (p < s.size() && s[p] != ',' && s[p] != close) item += s[p++];
      item = utf8::trim(item);
      pos = p;
    }
    items.push_back(std::move(item));
    while (pos < s.size() && is_blank(s[pos])) ++pos;
    if (pos >= s.size()) return std::nullopt;
    if (s[pos] == ',') {
      ++pos;
      continue;
    }
    if (s[pos] == close) break;
    return std::nullopt;
  }
  return items;
}

}  // namespace

std::string serialize_edit(const AtomicEdit& edit) {
  return "[" + quote(to_string(edit.op)) + ", " + quote(edit.orig) + ", " + quote(edit.tgt) + "]";
}

std::string serialize_edits(std::span<const AtomicEdit> edits) {
  std::string out;
  for (const auto& e : edits) {
    if (!out.empty()) out += '\n';
    out += serialize_edit(e);
  }
  return out;
}

ParsedEdits parse_edit_lines(std::string_view text) {
  ParsedEdits out;
  std::size_t recognized = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = utf8::trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;

    const auto sq = line.find('[');
    const auto par = line.find('(');
    std::optional<std::vector<std::string>> items;
    if (sq != std::string::npos && (par == std::string::npos || sq < par)) {
      items = read_items(line, sq + 1, ']');
    } else if (par != std::string::npos) {
      items = read_items(line, par + 1, ')');
    }
    if (items && items->empty()) {
      ++recognized;
      continue;
    }
    if (!items || items->size() != 3) {
      out.warnings.push_back("skipped line: " + line);
      continue;
    }
    const auto op = parse_op((*items)[0]);
    if (!op) {
      out.warnings.push_back("unknown operation: " + line);
      continue;
    }
    ++recognized;
    AtomicEdit e{*op, (*items)[1], (*items)[2], {}, {}};
    if (auto why = invariant_violation(e)) {
      // Normalize what the triple evidently means.
      if (e.orig.empty() && e.tgt.empty()) {
        out.warnings.push_back("dropped empty edit: " + line);
        continue;
      }
      if (e.op == EditOp::Relocate || e.op == EditOp::Replace) {
        if (e.orig.empty()) {
          e = make_insert(e.tgt);
        } else if (e.tgt.empty()) {
          e = make_delete(e.orig);
        } else if (e.op == EditOp::Relocate) {
          out.edits.push_back(make_delete(e.orig));
          e = make_insert(e.tgt);
        } else {
          out.warnings.push_back("dropped identity replace: " + line);
          continue;
        }
      } else if (e.op == EditOp::Insert) {
        e = e.tgt.empty() ? make_insert(e.orig) : make_replace(e.orig, e.tgt);
        if (e.op == EditOp::Replace && e.orig == e.tgt) {
          out.warnings.push_back("dropped identity replace: " + line);
          continue;
        }
      } else {
        e = e.orig.empty() ? make_delete(e.tgt) : make_replace(e.orig, e.tgt);
        if (e.op == EditOp::Replace && e.orig == e.tgt) {
          out.warnings.push_back("dropped identity replace: " + line);
          continue;
        }
      }
      out.warnings.push_back(*why + ", normalized: " + line);
    }
    out.edits.push_back(std::move(e));
  }
  if (recognized == 0 && !utf8::trim(text).empty()) {
    throw DataError("no edit lines in model reply: " + std::string(text));
  }
  return out;
}

}  // namespace gee
