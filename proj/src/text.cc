// Copyright 2026 The EntEval Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "enteval/text.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "enteval/core.h"

namespace enteval {

namespace {

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

constexpr std::array<std::string_view, 32> kAbbreviations = {
    "mr",  "mrs",  "ms",   "dr",  "prof", "sr",  "jr",   "st",
    "mt",  "vs",   "etc",  "e.g", "i.e",  "inc", "ltd",  "co",
    "corp", "no",  "gen",  "col", "lt",   "sgt", "capt", "gov",
    "jan", "feb",  "aug",  "sept", "oct", "nov", "dec",  "u.s"};

bool IsTerminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool IsCloser(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']';
}

bool IsSentenceStart(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '"' ||
         c == '\'' || c == '(' || u >= 0x80;
}

}  // namespace

std::vector<Token> TokenizeWithOffsets(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (IsSpace(c)) {
      ++i;
    } else if (IsPunct(c)) {
      out.push_back({std::string(1, static_cast<char>(std::tolower(c))), i,
                     i + 1});
      ++i;
    } else {
      std::size_t j = i;
      while (j < n) {
        const auto d = static_cast<unsigned char>(text[j]);
        if (IsSpace(d) || IsPunct(d)) break;
        ++j;
      }
      out.push_back({Lowercase(std::string(text.substr(i, j - i))), i, j});
      i = j;
    }
  }
  return out;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto &t : TokenizeWithOffsets(text)) out.push_back(std::move(t.text));
  return out;
}

bool IsAbbreviation(std::string_view word) {
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

std::vector<SentenceRange> SplitSentences(std::string_view text) {
  std::vector<SentenceRange> out;
  const std::size_t n = text.size();
  std::size_t begin = 0;
  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && IsSpace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && IsSpace(static_cast<unsigned char>(text[e - 1]))) --e;
    if (e > b) out.push_back({b, e});
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!IsTerminal(text[i])) continue;
    std::size_t end = i + 1;
    while (end < n && (IsTerminal(text[end]) || IsCloser(text[end]))) ++end;
    std::size_t next = end;
    while (next < n && IsSpace(static_cast<unsigned char>(text[next]))) ++next;
    if (next == end && next < n) continue;  // no whitespace after terminal
    if (next < n && !IsSentenceStart(text[next])) continue;
    if (text[i] == '.') {
      std::size_t w = i;
      while (w > begin && !IsSpace(static_cast<unsigned char>(text[w - 1])) &&
             text[w - 1] != '(' && text[w - 1] != '"') {
        --w;
      }
      const std::string word = Lowercase(std::string(text.substr(w, i - w)));
      if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) {
        continue;
      }
      if (IsAbbreviation(word)) continue;
    }
    emit(begin, end);
    begin = end;
    i = end - 1;
  }
  emit(begin, n);
  return out;
}

}  // namespace enteval
