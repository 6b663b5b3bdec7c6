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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gee/eval.hpp"

namespace gee::testing {

// Shape of a synthetic annotation set. Pairs in the dual groups are rated by
// annotators "A" and "B"; every other pair only by "A".
struct AnnotationPlan {
  std::size_t pairs = 0;
  std::size_t explanations = 0;
  std::map<MistakeLabel, std::size_t> mistakes;
  std::size_t missing = 0;
  std::size_t agree_clean = 0;
  std::size_t agree_with_mistake = 0;
  std::size_t disagree_missing = 0;
  std::size_t disagree_other = 0;
};

struct AnnotationSet {
  std::vector<AnnotationRecord> records;
  std::set<std::string> dual_ids;
};

// Lays out records so that the tallies equal the plan exactly.
inline AnnotationSet build_annotations(const AnnotationPlan& plan) {
  AnnotationSet out;
  std::vector<MistakeLabel> pool;
  for (const auto& [label, n] : plan.mistakes) pool.insert(pool.end(), n, label);
  std::size_t next_mistake = 0;
  std::size_t missing_left = plan.missing;

  const std::size_t dual = plan.agree_clean + plan.agree_with_mistake + plan.disagree_missing + plan.disagree_other;
  const std::size_t items = plan.pairs + dual;
  const std::size_t per_dual = plan.explanations / items;
  const std::size_t single = plan.pairs - dual;
  const std::size_t single_expl = plan.explanations - 2 * dual * per_dual;

  auto add = [&](const std::string& id, const std::string& who, std::size_t index, MistakeLabel label) {
    out.records.push_back({id, who, index, label});
  };
  auto add_missing = [&](const std::string& id, const std::string& who) {
    out.records.push_back({id, who, std::nullopt, MistakeLabel::MissingError});
    --missing_left;
  };

  std::size_t d = 0;
  auto dual_pair = [&](int kind) {
    const std::string id = "dual-" + std::to_string(d++);
    out.dual_ids.insert(id);
    for (const char* who : {"A", "B"}) {
      for (std::size_t i = 0; i < per_dual; ++i) {
        MistakeLabel label = MistakeLabel::Correct;
        if (i == 0 && kind == 1) label = pool[next_mistake];
        if (i == 0 && kind == 3 && std::string(who) == "A") label = pool[next_mistake];
        add(id, who, i, label);
      }
      if (kind == 2 && std::string(who) == "A") add_missing(id, who);
    }
    if (kind == 1) {
      // Both annotators used the same label, which counts twice.
      pool.erase(pool.begin() + static_cast<long>(next_mistake) + 1);
      ++next_mistake;
    } else if (kind == 3) {
      ++next_mistake;
    }
  };
  for (std::size_t i = 0; i < plan.agree_clean; ++i) dual_pair(0);
  for (std::size_t i = 0; i < plan.agree_with_mistake; ++i) dual_pair(1);
  for (std::size_t i = 0; i < plan.disagree_missing; ++i) dual_pair(2);
  for (std::size_t i = 0; i < plan.disagree_other; ++i) dual_pair(3);

  for (std::size_t s = 0; s < single; ++s) {
    const std::string id = "single-" + std::to_string(s);
    const std::size_t n = single_expl / single + (s < single_expl % single ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      MistakeLabel label = MistakeLabel::Correct;
      if (i == 0 && next_mistake < pool.size()) label = pool[next_mistake++];
      add(id, "A", i, label);
    }
    if (missing_left > 0) add_missing(id, "A");
  }
  return out;
}

// German teacher evaluation: 596 pairs, 96 of them rated twice.
inline AnnotationPlan german_plan() {
  AnnotationPlan p;
  p.pairs = 596;
  p.explanations = 1986;
  p.mistakes = {{MistakeLabel::WrongEditDescription, 65},
                {MistakeLabel::WrongEditReason, 29},
                {MistakeLabel::WrongErrorType, 12},
                {MistakeLabel::HallucinatedError, 15}};
  p.missing = 67;
  p.agree_clean = 73;
  p.agree_with_mistake = 5;
  p.disagree_missing = 8;
  p.disagree_other = 10;
  return p;
}

// Chinese teacher evaluation: 200 pairs, one rater.
inline AnnotationPlan chinese_plan() {
  AnnotationPlan p;
  p.pairs = 200;
  p.explanations = 302;
  p.mistakes = {{MistakeLabel::WrongEditDescription, 1},
                {MistakeLabel::WrongEditReason, 3},
                {MistakeLabel::WrongErrorType, 2}};
  return p;
}

}  // namespace gee::testing
