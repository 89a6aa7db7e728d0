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

// Tokenization and sentence splitting shared by datagen and wikient.
//
// Tokenizer rule: bytes are classified as whitespace (space, tab, CR, LF,
// FF, VT), ASCII punctuation (std::ispunct in the C locale), or word bytes
// (everything else, including all UTF-8 lead and continuation bytes). A
// token is either a maximal run of word bytes or a single punctuation byte.
// Tokens are lower-cased (ASCII only). Span indices produced anywhere in
// the toolkit refer to this token sequence.

#ifndef ENTEVAL_TEXT_H_
#define ENTEVAL_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace enteval {

struct Token {
  std::string text;    // lower-cased
  std::size_t begin;   // byte offset into the source text
  std::size_t end;     // one past the last byte
};

std::vector<Token> TokenizeWithOffsets(std::string_view text);
std::vector<std::string> Tokenize(std::string_view text);

// Byte ranges [begin, end) of sentences. A sentence ends after '.', '!' or
// '?' (plus any closing quotes or brackets) when followed by whitespace and
// then an upper-case letter, digit, or opening quote, unless the word
// before a '.' is on the abbreviation list or is a single letter.
struct SentenceRange {
  std::size_t begin;
  std::size_t end;
};

std::vector<SentenceRange> SplitSentences(std::string_view text);

// True for lower-cased abbreviations such as "mr", "e.g", "st".
bool IsAbbreviation(std::string_view word);

}  // namespace enteval

#endif  // ENTEVAL_TEXT_H_
