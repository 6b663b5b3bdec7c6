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
#include <string>
#include <string_view>
#include <vector>

namespace gee {

// One s_i: "[edit description] because [edit reason]" plus its error type.
struct Explanation {
  std::string edit_desc;
  std::string reason;
  std::string error_type;
  std::string raw;
  // Index into the edit list the explanation was generated for.
  std::optional<std::size_t> matched_edit;

  // edit_desc and reason joined back with " because ".
  std::string sentence() const;
  friend bool operator==(const Explanation&, const Explanation&) = default;
};

struct ParsedExplanations {
  std::vector<Explanation> explanations;
  std::vector<std::string> warnings;
};

// Splits a reply into (sentence, "Error type: ...") blocks. Never throws; an
// empty result is left for the caller to judge.
ParsedExplanations parse_explanations(std::string_view text);

// Renders blocks in the reply format parse_explanations() reads.
std::string format_explanations(const std::vector<Explanation>& explanations);

}  // namespace gee
