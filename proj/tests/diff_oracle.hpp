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

// Independent longest-match oracle for the token diff.

#include <string>
#include <vector>

#include "gee/diff.hpp"

namespace gee::testing {

using Strings = std::vector<std::string>;

// Exhaustive search over every pair of start positions and lengths. Ties go
// to the smallest source start, then the smallest target start.
inline MatchBlock brute_longest(const Strings& a, const Strings& b, Span ar, Span br) {
  MatchBlock best{ar.lo, br.lo, 0};
  for (std::size_t i = ar.lo; i < ar.hi; ++i) {
    for (std::size_t j = br.lo; j < br.hi; ++j) {
      std::size_t k = 0;
      while (i + k < ar.hi && j + k < br.hi && a[i + k] == b[j + k]) ++k;
      if (k > best.len) best = {i, j, k};
    }
  }
  return best;
}

inline void brute_blocks(const Strings& a, const Strings& b, Span ar, Span br,
                         std::vector<MatchBlock>& out) {
  if (ar.empty() || br.empty()) return;
  const auto m = brute_longest(a, b, ar, br);
  if (m.len == 0) return;
  brute_blocks(a, b, {ar.lo, m.src}, {br.lo, m.tgt}, out);
  out.push_back(m);
  brute_blocks(a, b, {m.src + m.len, ar.hi}, {m.tgt + m.len, br.hi}, out);
}

}  // namespace gee::testing
