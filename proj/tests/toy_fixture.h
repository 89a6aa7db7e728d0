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

// The synthetic hyperlink corpus under tests/data/toy and the small models
// the toy-trainer checks run on.

#ifndef ENTEVAL_TESTS_TOY_FIXTURE_H_
#define ENTEVAL_TESTS_TOY_FIXTURE_H_

#include <string>
#include <vector>

#include "enteval/toytrain.h"
#include "enteval/wikient.h"

namespace toy_fixture {

struct Corpus {
  enteval::toy::Vocab vocab;
  std::vector<enteval::toy::EncodedPair> pairs;
};

inline Corpus Load() {
  const std::string dir = std::string(ENTEVAL_TEST_DATA) + "/toy/";
  const auto descs = enteval::ReadDescriptions(dir + "descriptions.jsonl");
  const auto pairs = enteval::ReadPairs(dir + "pairs.jsonl", descs);
  std::vector<std::vector<std::string>> text;
  for (const auto &p : pairs) {
    text.push_back(p.context.tokens);
    text.push_back(p.description.tokens);
  }
  Corpus c{enteval::toy::Vocab::Build(text), {}};
  for (const auto &p : pairs) {
    c.pairs.push_back(enteval::toy::EncodePair(c.vocab, p.context, p.description));
  }
  return c;
}

inline enteval::toy::ModelDims Dims(const Corpus &c) {
  return {c.vocab.size(), 8, 8, 8};
}

// Random pair over a V = 12 vocabulary (5 specials + 7 words).
inline enteval::toy::EncodedPair TinyPair() {
  return {{5, 6, 7, 8, 9}, {1, 2}, {10, 11, 5, 7}};
}

inline enteval::toy::ModelDims TinyDims() { return {12, 3, 4, 3}; }

}  // namespace toy_fixture

#endif  // ENTEVAL_TESTS_TOY_FIXTURE_H_
