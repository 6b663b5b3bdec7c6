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

#include <string>
#include <string_view>
#include <vector>

namespace gee::utf8 {

// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD one byte at a
// time, so the number of code points never exceeds the number of bytes.
std::u32string decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

// One string per code point.
std::vector<std::string> split_code_points(std::string_view text);

std::size_t length(std::string_view text);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_han(char32_t cp);
bool is_ascii_alnum(char32_t cp);

// True when every code point is punctuation (and the text is non-empty).
bool all_punct(std::string_view text);

std::string trim(std::string_view text);

// Collapses runs of whitespace to one ASCII space and trims both ends.
std::string normalize_space(std::string_view text);

// Removes all whitespace.
std::string strip_space(std::string_view text);

}  // namespace gee::utf8
