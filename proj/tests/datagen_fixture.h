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

// Source corpora for the datagen fixtures (written by
// data/datagen/make_fixtures.py) and their frozen outputs under
// data/datagen/golden, produced at seed 42 with FixtureSpec().

#ifndef ENTEVAL_TESTS_DATAGEN_FIXTURE_H_
#define ENTEVAL_TESTS_DATAGEN_FIXTURE_H_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "enteval/datagen.h"

namespace datagen_fixture {

inline std::string Root() { return std::string(ENTEVAL_TEST_DATA) + "/datagen"; }
inline std::string SourceDir(enteval::Task t) {
  return Root() + "/" + enteval::TaskName(t);
}
inline std::string GoldenDir(enteval::Task t) {
  return Root() + "/golden/" + enteval::TaskName(t);
}
inline std::string WordVectors() { return Root() + "/wordvec.txt"; }

// Table-1 targets (scaled down by the small sources) except the ERT
// relation target: four relations qualify and three are kept.
inline enteval::SplitSpec FixtureSpec() {
  enteval::SplitSpec spec;
  spec.ert_relations = 3;
  return spec;
}

inline constexpr const char *kEasyRelation = "/geography/lake/outflow";

inline std::string Slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Files of `dir`, sorted by name.
inline std::vector<std::string> Files(const std::string &dir) {
  std::vector<std::string> names;
  for (const auto &e : std::filesystem::directory_iterator(dir)) {
    names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace datagen_fixture

#endif  // ENTEVAL_TESTS_DATAGEN_FIXTURE_H_
