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
#include <string_view>

namespace gee {

// A text file compiled into the library. `name` is the file stem.
struct EmbeddedText {
  std::string_view name;
  std::string_view body;
};

std::span<const EmbeddedText> prompt_assets();
std::span<const EmbeddedText> lexicon_assets();

}  // namespace gee
