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

// Random (source, target) token pairs built by perturbing a random sentence
// with inserts, deletes, replacements and moves.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gee/tokenize.hpp"
#include "gee/utf8.hpp"

namespace gee::testing {

inline const std::vector<std::string>& fuzz_vocab() {
  static const std::vector<std::string> words = {
      "ich",   "du",     "er",     "sie",    "wir",    "haben",  "habe",   "hat",    "sein",
      "ist",   "bin",    "war",    "ein",    "eine",   "einen",  "der",    "die",    "das",
      "dem",   "den",    "und",    "oder",   "aber",   "weil",   "dass",   "nicht",  "auch",
      "mit",   "nach",   "zu",     "in",     "im",     "am",     "Haus",   "Hause",  "Termin",
      "termin", "machen", "mache", "gehen",  "gehe",   "Apfel",  "Bananen", "zwei",  "heute",
      "morgen", "gern",  "sehr",   "gut",    "Schule", "Stadt",  "Freund", "Freunde", "kaufen",
      "gekauft", "essen", "gegessen", ",",   ".",      "?",      "!",      ":"};
  return words;
}

// Perturbs one character of `w` so the refiner sees near-miss spellings.
inline std::string misspell(const std::string& w, std::mt19937& rng) {
  if (w.size() < 2) return w;
  std::string out = w;
  std::uniform_int_distribution<std::size_t> pos(0, w.size() - 1);
  std::uniform_int_distribution<int> kind(0, 2);
  const std::size_t p = pos(rng);
  if (static_cast<unsigned char>(out[p]) >= 0x80) return w + "n";
  switch (kind(rng)) {
    case 0:
      out.erase(p, 1);
      break;
    case 1:
      out.insert(p, 1, 'e');
      break;
    default:
      out[p] = out[p] == 'a' ? 'o' : 'a';
      break;
  }
  return out.empty() ? w : out;
}

inline std::pair<std::vector<std::string>, std::vector<std::string>> random_pair(std::mt19937& rng,
                                                                                  std::size_t max_len = 50) {
  const auto& vocab = fuzz_vocab();
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::vector<std::string> src;
  for (std::size_t n = len(rng); n > 0; --n) src.push_back(vocab[word(rng)]);
  auto tgt = src;
  std::uniform_int_distribution<int> ops(0, 5);
  std::uniform_int_distribution<int> kind(0, 4);
  for (int k = ops(rng); k > 0; --k) {
    auto at = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n)(rng); };
    switch (kind(rng)) {
      case 0:
        if (tgt.size() < max_len) tgt.insert(tgt.begin() + static_cast<std::ptrdiff_t>(at(tgt.size())), vocab[word(rng)]);
        break;
      case 1:
        if (tgt.size() > 1) tgt.erase(tgt.begin() + static_cast<std::ptrdiff_t>(at(tgt.size() - 1)));
        break;
      case 2:
        if (!tgt.empty()) tgt[at(tgt.size() - 1)] = vocab[word(rng)];
        break;
      case 3:
        if (!tgt.empty()) {
          auto& w = tgt[at(tgt.size() - 1)];
          w = misspell(w, rng);
        }
        break;
      default:
        if (tgt.size() > 1) {
          const std::size_t from = at(tgt.size() - 1);
          auto w = tgt[from];
          tgt.erase(tgt.begin() + static_cast<std::ptrdiff_t>(from));
          tgt.insert(tgt.begin() + static_cast<std::ptrdiff_t>(at(tgt.size())), w);
        }
        break;
    }
  }
  return {std::move(src), std::move(tgt)};
}

}  // namespace gee::testing
