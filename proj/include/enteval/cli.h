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

// The `enteval` command line: configuration resolution, subcommand
// dispatch and report assembly.
//
// Settings resolve as flags > config file (--config, flat key=value) >
// ENTEVAL_DATA_DIR (data_root only) > built-in defaults.
//
// Exit codes: 0 success, 1 usage error, 2 data or format error.

#ifndef ENTEVAL_CLI_H_
#define ENTEVAL_CLI_H_

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "enteval/datagen.h"
#include "enteval/tasks.h"

namespace enteval::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct RunConfig {
  std::string data_root = "data";  // task datasets under <data_root>/<task>
  std::string emb_dir;             // default <data_root>/embeddings
  std::string sources;             // datagen sources under <sources>/<task>
  std::string wordvec;             // word-vector table for datagen and embed
  std::vector<Task> tasks{std::begin(kAllTasks), std::end(kAllTasks)};
  TaskConfig task;
  SplitSpec split;
  int jobs = 1;

  std::string TaskDir(Task t) const;
  std::string EmbeddingPath(Task t) const;  // <emb_dir>/<task>.eev
};

using Settings = std::map<std::string, std::string>;

// Recognized setting keys, in documentation order.
const std::vector<std::string> &SettingKeys();

// Parses one setting into `cfg`; UsageError on an unknown key or a bad
// value.
void ApplySetting(const std::string &key, const std::string &value,
                  RunConfig *cfg);

// key=value lines; '#' starts a comment. UsageError on malformed lines or
// unknown keys, DataError when the file cannot be read.
Settings ReadConfigFile(const std::string &path);

// Defaults, then `env_data_dir`, then the config file, then `flags`.
RunConfig ResolveConfig(const Settings &flags,
                        const std::optional<std::string> &config_path,
                        const std::optional<std::string> &env_data_dir);

// One run per layer (sorted by layer index) followed by the mixed run.
std::vector<TaskReport> PerLayerReports(const TaskData &data,
                                        const EmbeddingSet &emb,
                                        const TaskConfig &cfg, int jobs = 1);

// Runs independent jobs on up to `jobs` threads; results keep job order.
// The first failing job's exception is rethrown.
std::vector<TaskReport> RunParallel(
    const std::vector<std::function<TaskReport()>> &work, int jobs);

// Entry point. `env_data_dir` stands in for ENTEVAL_DATA_DIR.
int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err,
        const std::optional<std::string> &env_data_dir = std::nullopt);

}  // namespace enteval::cli

#endif  // ENTEVAL_CLI_H_
