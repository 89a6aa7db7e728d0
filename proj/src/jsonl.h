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

// Line-oriented JSON reading shared by the dataset readers.

#ifndef ENTEVAL_SRC_JSONL_H_
#define ENTEVAL_SRC_JSONL_H_

#include <fstream>
#include <stdexcept>
#include <string>

#include "enteval/core.h"
#include "json.hpp"

namespace enteval::internal {

// Calls f(json) for every nonblank line. Parse errors and
// std::invalid_argument from `f` become FormatError naming path:line.
template <typename F>
void ForEachJsonLine(const std::string &path, F &&f) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception &e) {
      throw FormatError(path + ":" + std::to_string(n) + ": " + e.what());
    } catch (const std::invalid_argument &e) {
      throw FormatError(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

}  // namespace enteval::internal

#endif  // ENTEVAL_SRC_JSONL_H_
