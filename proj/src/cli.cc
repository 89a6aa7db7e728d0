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

#include "enteval/cli.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "enteval/toytrain.h"
#include "enteval/wikient.h"

namespace enteval::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kKeys = {
    "data_root",     "emb_dir",          "sources",        "wordvec",
    "tasks",         "seed",             "learning_rate",  "epochs",
    "batch_size",    "patience",         "l2",             "mix_mode",
    "train_mix",     "layer",            "threshold_objective", "jobs",
    "cap_same",      "cap_next",         "cap_bins",       "cerp",
    "cerp_per_class", "efp",             "ert_per_relation", "ert_relations",
    "ert_min_tuples", "rare",            "conll_candidates"};

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string &key, const std::string &value) {
  T out{};
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("bad value for " + key + ": '" + value + "'");
  }
  return out;
}

double ParseDouble(const std::string &key, const std::string &value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw UsageError("bad value for " + key + ": '" + value + "'");
  }
}

std::vector<std::string> SplitComma(const std::string &value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(Trim(item));
  return parts;
}

SplitSizes ParseSizes(const std::string &key, const std::string &value) {
  const auto parts = SplitComma(value);
  if (parts.size() != 3) {
    throw UsageError(key + " needs train,dev,test sizes: '" + value + "'");
  }
  SplitSizes s{};
  for (std::size_t i = 0; i < 3; ++i) s[i] = ParseNumber<std::size_t>(key, parts[i]);
  return s;
}

bool ParseBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("bad value for " + key + ": '" + value + "'");
}

std::vector<Task> ParseTasks(const std::string &value) {
  if (value == "all") return {std::begin(kAllTasks), std::end(kAllTasks)};
  std::vector<Task> tasks;
  for (const auto &name : SplitComma(value)) {
    try {
      const Task t = ParseTask(name);
      if (std::find(tasks.begin(), tasks.end(), t) == tasks.end()) tasks.push_back(t);
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    }
  }
  if (tasks.empty()) throw UsageError("no tasks selected");
  std::sort(tasks.begin(), tasks.end());
  return tasks;
}

// Output stream: the named file, or `fallback` when `path` is empty.
class Output {
 public:
  Output(const std::string &path, std::ostream &fallback) : stream_(&fallback) {
    if (path.empty()) return;
    if (fs::path(path).has_parent_path()) {
      fs::create_directories(fs::path(path).parent_path());
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw DataError("cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream &operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream *stream_;
};

// Flags that map onto setting keys; copied into Settings when given.
class FlagBinder {
 public:
  void Bind(CLI::App *app, const std::string &flag, const std::string &key,
            const std::string &help) {
    auto value = std::make_shared<std::string>();
    CLI::Option *opt = app->add_option(flag, *value, help);
    bound_.push_back({opt, key, value});
  }
  Settings Collect() const {
    Settings s;
    for (const auto &b : bound_) {
      if (b.option->count() > 0) s[b.key] = *b.value;
    }
    return s;
  }

 private:
  struct Bound {
    CLI::Option *option;
    std::string key;
    std::shared_ptr<std::string> value;
  };
  std::vector<Bound> bound_;
};

void BindCommon(CLI::App *app, FlagBinder *b) {
  b->Bind(app, "--data-root", "data_root", "task dataset root (<root>/<task>)");
  b->Bind(app, "--task,--tasks", "tasks", "task list, comma-separated, or 'all'");
  b->Bind(app, "--seed", "seed", "random seed");
  b->Bind(app, "--jobs", "jobs", "parallel task runs");
}

void BindTraining(CLI::App *app, FlagBinder *b) {
  b->Bind(app, "--emb-dir", "emb_dir", "embedding directory (<dir>/<task>.eev)");
  b->Bind(app, "--lr", "learning_rate", "probe learning rate");
  b->Bind(app, "--epochs", "epochs", "probe epochs");
  b->Bind(app, "--batch-size", "batch_size", "minibatch size (0: full batch)");
  b->Bind(app, "--patience", "patience", "early-stopping patience");
  b->Bind(app, "--l2", "l2", "L2 penalty");
  b->Bind(app, "--mix-mode", "mix_mode", "softmax_scaled or unnormalized");
  b->Bind(app, "--train-mix", "train_mix", "learn mixing weights (true/false)");
  b->Bind(app, "--layer", "layer", "single layer index or 'mixed'");
  b->Bind(app, "--threshold-objective", "threshold_objective",
          "ET threshold objective: f1 or accuracy");
}

std::string ReadWholeFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

WordVectorTable LoadTable(const RunConfig &cfg, const char *purpose) {
  if (cfg.wordvec.empty()) {
    throw UsageError(std::string("--wordvec is required for ") + purpose);
  }
  return LoadWordVectors(cfg.wordvec);
}

// ---------------------------------------------------------------- commands

void CmdDatagen(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  if (cfg.sources.empty()) throw UsageError("datagen needs --sources");
  std::optional<WordVectorTable> table;
  for (Task t : cfg.tasks) {
    if (t == Task::kCap || t == Task::kCerp || t == Task::kErt) {
      if (!table) table = LoadTable(cfg, "cap, cerp and ert");
    }
  }
  out << "task\tcounter\tvalue\n";
  for (Task t : cfg.tasks) {
    const std::string src = cfg.sources + "/" + TaskName(t);
    if (!fs::is_directory(src)) throw DataError("no source directory " + src);
    fs::create_directories(cfg.TaskDir(t));
    const GenReport report = RunDatagen(t, src, table ? &*table : nullptr,
                                        cfg.split, cfg.TaskDir(t));
    for (const auto &[key, n] : report.counts) {
      out << TaskName(t) << '\t' << key << '\t' << n << '\n';
    }
    for (const auto &w : report.warnings) err << "warning: " << w << '\n';
  }
}

void CmdWikient(const std::string &dump, const std::string &pairs_out,
                const std::string &desc_out, std::ostream &out,
                std::ostream &err) {
  std::ifstream first(dump, std::ios::binary);
  if (!first) throw DataError("cannot read " + dump);
  const PageIndex index = PageIndex::Build(first);
  std::ifstream second(dump, std::ios::binary);
  Output pairs(pairs_out, out);
  std::map<std::string, EntityDescription> used;
  ExtractStats stats;
  ExtractPairs(
      second, index,
      [&](const HyperlinkPair &p) {
        WritePair(p, *pairs);
        used.emplace(p.entity_id, p.description);
      },
      &stats, &err);
  std::ofstream descs(desc_out, std::ios::binary);
  if (!descs) throw DataError("cannot write " + desc_out);
  for (const auto &[id, d] : used) WriteDescription(d, descs);
  const std::pair<const char *, long> rows[] = {
      {"pages", stats.pages},
      {"skipped_pages", stats.skipped_pages},
      {"linked_sentences", stats.linked_sentences},
      {"multi_link_sentences", stats.multi_link_sentences},
      {"links", stats.links},
      {"kept", stats.kept},
      {"dropped_no_description", stats.dropped_no_description},
      {"dropped_misaligned", stats.dropped_misaligned},
      {"descriptions", static_cast<long>(used.size())}};
  std::ostream &report = pairs_out.empty() ? err : out;
  for (const auto &[k, v] : rows) report << k << '\t' << v << '\n';
}

void CmdEmbed(const RunConfig &cfg, const std::string &encoder,
              const std::string &out_path, std::ostream &out) {
  if (encoder != "avgvec") throw UsageError("unknown encoder: " + encoder);
  if (!out_path.empty() && cfg.tasks.size() != 1) {
    throw UsageError("--out needs a single --task");
  }
  const WordVectorTable table = LoadTable(cfg, "avgvec");
  out << "task\tinstances\tall_oov\toov_tokens\tpath\n";
  for (Task t : cfg.tasks) {
    const TaskData data = LoadTaskData(t, cfg.TaskDir(t));
    AvgvecStats stats;
    const EmbeddingSet set =
        AvgvecEmbeddings(EmbeddingRequests(data), table, &stats);
    const std::string path = out_path.empty() ? cfg.EmbeddingPath(t) : out_path;
    if (fs::path(path).has_parent_path()) {
      fs::create_directories(fs::path(path).parent_path());
    }
    WriteEmbeddings(set, path);
    out << TaskName(t) << '\t' << set.n_instances() << '\t' << stats.all_oov
        << '\t' << stats.oov_tokens << '\t' << path << '\n';
  }
}

struct Loaded {
  Task task;
  TaskData data;
  EmbeddingSet emb;
};

std::vector<Loaded> LoadAll(const RunConfig &cfg, const std::string &single) {
  if (!single.empty() && cfg.tasks.size() != 1) {
    throw UsageError("--embeddings needs a single --task");
  }
  std::vector<Loaded> all;
  for (Task t : cfg.tasks) {
    all.push_back({t, LoadTaskData(t, cfg.TaskDir(t)),
                   ReadEmbeddings(single.empty() ? cfg.EmbeddingPath(t) : single)});
  }
  return all;
}

void CmdEval(const RunConfig &cfg, const std::string &embeddings,
             bool per_layer, std::ostream &out) {
  const std::vector<Loaded> all = LoadAll(cfg, embeddings);
  std::vector<std::function<TaskReport()>> work;
  for (const auto &l : all) {
    if (per_layer) {
      for (std::size_t layer = 0; layer < l.emb.n_layers(); ++layer) {
        TaskConfig c = cfg.task;
        c.layer = layer;
        work.push_back([&l, c] { return RunTask(l.data, l.emb, c); });
      }
      TaskConfig mixed = cfg.task;
      mixed.layer.reset();
      work.push_back([&l, mixed] { return RunTask(l.data, l.emb, mixed); });
    } else {
      work.push_back([&l, &cfg] { return RunTask(l.data, l.emb, cfg.task); });
    }
  }
  WriteReportTsv(RunParallel(work, cfg.jobs), out);
}

// Generic probe over an embedding set and an "id<TAB>split<TAB>label" file.
void CmdProbe(const RunConfig &cfg, const std::string &embeddings,
              const std::string &labels_path, const std::string &loss_name,
              const std::string &model_out, std::ostream &out) {
  ProbeLoss loss;
  if (loss_name == "binary") {
    loss = ProbeLoss::kBinaryLog;
  } else if (loss_name == "cross_entropy") {
    loss = ProbeLoss::kCrossEntropy;
  } else if (loss_name == "multilabel") {
    loss = ProbeLoss::kMultilabelBinaryLog;
  } else {
    throw UsageError("unknown loss: " + loss_name);
  }
  const EmbeddingSet emb = ReadEmbeddings(embeddings);
  std::array<ProbeInputs, 3> in;
  for (auto &i : in) {
    i.dim = static_cast<Eigen::Index>(emb.dim());
    i.n_layers = static_cast<Eigen::Index>(emb.n_layers());
  }
  std::istringstream lines(ReadWholeFile(labels_path));
  std::string line;
  int max_label = 0;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (f.size() == 2) f.emplace_back();
    const std::string where = labels_path + ":" + std::to_string(line_no);
    if (f.size() != 3) throw FormatError(where + ": expected id, split, label");
    const auto split = std::find(std::begin(kSplits), std::end(kSplits), f[1]);
    if (split == std::end(kSplits)) throw FormatError(where + ": bad split " + f[1]);
    ProbeInputs &target = in[static_cast<std::size_t>(split - std::begin(kSplits))];
    const std::size_t item = target.AddItem(emb.Layers(emb.IndexOf(f[0])));
    target.rows.push_back({item, 0});
    try {
      if (loss == ProbeLoss::kMultilabelBinaryLog) {
        std::set<int> s;
        for (const auto &p : SplitComma(f[2])) {
          if (!p.empty()) s.insert(ParseNumber<int>("label", p));
        }
        if (!s.empty()) max_label = std::max(max_label, *s.rbegin());
        target.label_sets.push_back(std::move(s));
      } else {
        const int y = ParseNumber<int>("label", Trim(f[2]));
        max_label = std::max(max_label, y);
        target.labels.push_back(y);
      }
    } catch (const UsageError &e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  const Eigen::Index n_classes = max_label + 1;
  const TrainResult fit = TrainTaskProbe(in[0], &in[1], loss, n_classes, cfg.task);
  std::vector<double> thresholds;
  auto scores = [&](const ProbeInputs &i) {
    return Eigen::MatrixXd(PredictRows(i, fit.model, fit.mix, loss).transpose());
  };
  if (loss == ProbeLoss::kMultilabelBinaryLog) {
    thresholds = in[1].rows.empty()
                     ? std::vector<double>(static_cast<std::size_t>(n_classes), 0.5)
                     : TuneThresholds(scores(in[1]), in[1].label_sets,
                                      cfg.task.threshold_objective);
  }
  out << "task\tsplit\tmetric\tvalue\tlayer\tseed\n";
  const std::string tail = "\t" +
                           (cfg.task.layer ? std::to_string(*cfg.task.layer)
                                           : std::string("mixed")) +
                           "\t" + std::to_string(cfg.task.train.seed) + "\n";
  for (std::size_t s = 0; s < 3; ++s) {
    if (in[s].rows.empty()) continue;
    const Eigen::MatrixXd p = scores(in[s]);  // rows x outputs
    double value = 0.0;
    const char *metric = "accuracy";
    if (loss == ProbeLoss::kMultilabelBinaryLog) {
      metric = "f1";
      value = MultilabelF1(ApplyThresholds(p, thresholds), in[s].label_sets).f1;
    } else {
      std::vector<int> pred(static_cast<std::size_t>(p.rows()));
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        Eigen::Index k = 0;
        if (loss == ProbeLoss::kBinaryLog) {
          k = p(r, 0) > 0.5 ? 1 : 0;
        } else {
          p.row(r).maxCoeff(&k);
        }
        pred[static_cast<std::size_t>(r)] = static_cast<int>(k);
      }
      value = Accuracy(pred, in[s].labels);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", 100.0 * value);
    out << "probe\t" << kSplits[s] << '\t' << metric << '\t' << buf << tail;
  }
  if (!model_out.empty()) {
    WriteEmbeddings(ModelToEmbeddingSet(fit.model.Cast<float>(), fit.mix.Cast<float>()),
                    model_out);
  }
}

struct ToyArgs {
  std::string pairs, descriptions, out;
  std::string variant = "full", softmax = "full";
  int steps = 200, negatives = 1024, positive_cap = 50;
  int embed = 8, hidden = 8, projected = 8;
  std::size_t max_vocab = 0;
  double learning_rate = 0.02;
  bool pad_boundaries = false;
};

void CmdToytrain(const RunConfig &cfg, const ToyArgs &a, std::ostream &out) {
  const auto descs = ReadDescriptions(a.descriptions);
  const auto pairs = ReadPairs(a.pairs, descs);
  if (pairs.empty()) throw DataError("no pairs in " + a.pairs);
  std::vector<std::vector<std::string>> text;
  for (const auto &p : pairs) {
    text.push_back(p.context.tokens);
    text.push_back(p.description.tokens);
  }
  const toy::Vocab vocab = toy::Vocab::Build(text, a.max_vocab);
  std::vector<toy::EncodedPair> encoded;
  for (const auto &p : pairs) {
    encoded.push_back(toy::EncodePair(vocab, p.context, p.description));
  }
  toy::TrainOptions opts;
  opts.steps = a.steps;
  opts.learning_rate = a.learning_rate;
  opts.seed = cfg.task.train.seed;
  try {
    opts.variant = toy::ParseVariant(a.variant);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  if (a.softmax == "full") {
    opts.loss.softmax = toy::SoftmaxMode::kFull;
  } else if (a.softmax == "sampled") {
    opts.loss.softmax = toy::SoftmaxMode::kSampled;
  } else {
    throw UsageError("unknown softmax mode: " + a.softmax);
  }
  opts.loss.negatives = a.negatives;
  opts.loss.positive_cap = a.positive_cap;
  opts.loss.pad_boundaries = a.pad_boundaries;
  toy::ToyModel model = toy::InitModel(
      {vocab.size(), a.embed, a.hidden, a.projected}, cfg.task.train.seed);
  const auto curve =
      toy::Train(&model, {vocab.bod(), vocab.boc()}, encoded, opts);
  Output o(a.out, out);
  toy::WriteCurve(curve, opts.variant, *o);
}

}  // namespace

// ---------------------------------------------------------------- config

std::string RunConfig::TaskDir(Task t) const {
  return data_root + "/" + TaskName(t);
}

std::string RunConfig::EmbeddingPath(Task t) const {
  const std::string dir = emb_dir.empty() ? data_root + "/embeddings" : emb_dir;
  return dir + "/" + TaskName(t) + ".eev";
}

const std::vector<std::string> &SettingKeys() { return kKeys; }

void ApplySetting(const std::string &key, const std::string &raw,
                  RunConfig *cfg) {
  const std::string value = Trim(raw);
  TrainConfig &train = cfg->task.train;
  SplitSpec &split = cfg->split;
  if (key == "data_root") {
    cfg->data_root = value;
  } else if (key == "emb_dir") {
    cfg->emb_dir = value;
  } else if (key == "sources") {
    cfg->sources = value;
  } else if (key == "wordvec") {
    cfg->wordvec = value;
  } else if (key == "tasks") {
    cfg->tasks = ParseTasks(value);
  } else if (key == "seed") {
    train.seed = ParseNumber<std::uint64_t>(key, value);
    split.seed = train.seed;
  } else if (key == "learning_rate") {
    train.learning_rate = ParseDouble(key, value);
  } else if (key == "epochs") {
    train.epochs = ParseNumber<int>(key, value);
  } else if (key == "batch_size") {
    train.batch_size = ParseNumber<int>(key, value);
  } else if (key == "patience") {
    train.early_stop_patience = ParseNumber<int>(key, value);
  } else if (key == "l2") {
    train.l2 = ParseDouble(key, value);
  } else if (key == "mix_mode") {
    try {
      cfg->task.mix_mode = ParseMixMode(value);
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    }
  } else if (key == "train_mix") {
    cfg->task.train_mix = ParseBool(key, value);
  } else if (key == "layer") {
    if (value == "mixed") {
      cfg->task.layer.reset();
    } else {
      cfg->task.layer = ParseNumber<std::size_t>(key, value);
    }
  } else if (key == "threshold_objective") {
    if (value == "f1") {
      cfg->task.threshold_objective = ThresholdObjective::kF1;
    } else if (value == "accuracy") {
      cfg->task.threshold_objective = ThresholdObjective::kAccuracy;
    } else {
      throw UsageError("bad value for threshold_objective: '" + value + "'");
    }
  } else if (key == "jobs") {
    cfg->jobs = ParseNumber<int>(key, value);
    if (cfg->jobs < 1) throw UsageError("jobs must be at least 1");
  } else if (key == "cap_same") {
    split.cap_same = ParseSizes(key, value);
  } else if (key == "cap_next") {
    split.cap_next = ParseSizes(key, value);
  } else if (key == "cap_bins") {
    split.cap_bins = ParseNumber<int>(key, value);
  } else if (key == "cerp") {
    split.cerp = ParseSizes(key, value);
  } else if (key == "cerp_per_class") {
    split.cerp_per_class = ParseNumber<std::size_t>(key, value);
  } else if (key == "efp") {
    split.efp = ParseSizes(key, value);
  } else if (key == "ert_per_relation") {
    split.ert_per_relation = ParseSizes(key, value);
  } else if (key == "ert_relations") {
    split.ert_relations = ParseNumber<std::size_t>(key, value);
  } else if (key == "ert_min_tuples") {
    split.ert_min_tuples = ParseNumber<std::size_t>(key, value);
  } else if (key == "rare") {
    split.rare = ParseSizes(key, value);
  } else if (key == "conll_candidates") {
    split.conll_candidates = ParseNumber<std::size_t>(key, value);
  } else {
    throw UsageError("unknown setting: " + key);
  }
}

Settings ReadConfigFile(const std::string &path) {
  std::istringstream in(ReadWholeFile(path));
  Settings s;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(n);
    if (eq == std::string::npos) throw UsageError(where + ": expected key=value");
    const std::string key = Trim(line.substr(0, eq));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw UsageError(where + ": unknown setting " + key);
    }
    s[key] = Trim(line.substr(eq + 1));
  }
  return s;
}

RunConfig ResolveConfig(const Settings &flags,
                        const std::optional<std::string> &config_path,
                        const std::optional<std::string> &env_data_dir) {
  RunConfig cfg;
  if (env_data_dir && !env_data_dir->empty()) cfg.data_root = *env_data_dir;
  if (config_path) {
    for (const auto &[k, v] : ReadConfigFile(*config_path)) ApplySetting(k, v, &cfg);
  }
  for (const auto &[k, v] : flags) ApplySetting(k, v, &cfg);
  try {
    cfg.task.train.Validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------- running

std::vector<TaskReport> RunParallel(
    const std::vector<std::function<TaskReport()>> &work, int jobs) {
  std::vector<TaskReport> results(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        results[i] = work[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)),
                                       work.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto &t : threads) t.join();
  }
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<TaskReport> PerLayerReports(const TaskData &data,
                                        const EmbeddingSet &emb,
                                        const TaskConfig &cfg, int jobs) {
  std::vector<std::function<TaskReport()>> work;
  for (std::size_t l = 0; l < emb.n_layers(); ++l) {
    TaskConfig c = cfg;
    c.layer = l;
    work.push_back([&data, &emb, c] { return RunTask(data, emb, c); });
  }
  TaskConfig mixed = cfg;
  mixed.layer.reset();
  work.push_back([&data, &emb, mixed] { return RunTask(data, emb, mixed); });
  return RunParallel(work, jobs);
}

int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err, const std::optional<std::string> &env_data_dir) {
  CLI::App app("Entity representation evaluation toolkit", "enteval");
  app.require_subcommand(1);
  app.fallthrough();  // --config is accepted after the subcommand
  app.failure_message(CLI::FailureMessage::help);
  std::string config_path;
  app.add_option("--config", config_path, "key=value settings file");

  FlagBinder binder;
  std::string embeddings, labels, loss = "binary", model_out, encoder = "avgvec",
                                  out_path, dump, pairs_out, desc_out;
  bool per_layer = false;
  ToyArgs toy;

  CLI::App *datagen = app.add_subcommand("datagen", "build task datasets from sources");
  BindCommon(datagen, &binder);
  binder.Bind(datagen, "--sources", "sources", "source root (<sources>/<task>)");
  binder.Bind(datagen, "--wordvec", "wordvec", "word vectors (cap, cerp, ert)");

  CLI::App *wikient = app.add_subcommand("wikient", "extract hyperlink pairs from a dump");
  wikient->add_option("--dump", dump, "MediaWiki XML dump")->required();
  wikient->add_option("--pairs-out", pairs_out, "pair JSONL (default stdout)");
  wikient->add_option("--descriptions-out", desc_out, "description JSONL")->required();

  CLI::App *embed = app.add_subcommand("embed", "encode task datasets to EEV1");
  BindCommon(embed, &binder);
  binder.Bind(embed, "--emb-dir", "emb_dir", "output directory (<dir>/<task>.eev)");
  binder.Bind(embed, "--wordvec", "wordvec", "word vectors");
  embed->add_option("--encoder", encoder, "encoder (avgvec)");
  embed->add_option("--out", out_path, "output file for a single task");

  CLI::App *probe = app.add_subcommand("probe", "train a linear probe on labeled embeddings");
  BindCommon(probe, &binder);
  BindTraining(probe, &binder);
  probe->add_option("--embeddings", embeddings, "EEV1 file")->required();
  probe->add_option("--labels", labels, "id<TAB>split<TAB>label lines")->required();
  probe->add_option("--loss", loss, "binary, cross_entropy or multilabel");
  probe->add_option("--model-out", model_out, "write the trained probe (EEV1)");

  CLI::App *eval = app.add_subcommand("eval", "evaluate embeddings on tasks");
  BindCommon(eval, &binder);
  BindTraining(eval, &binder);
  eval->add_option("--embeddings", embeddings, "EEV1 file for a single task");
  eval->add_option("--out", out_path, "report file (default stdout)");

  CLI::App *toytrain = app.add_subcommand("toytrain", "train the toy entity-aware model");
  BindCommon(toytrain, &binder);
  toytrain->add_option("--pairs", toy.pairs, "hyperlink pair JSONL")->required();
  toytrain->add_option("--descriptions", toy.descriptions, "description JSONL")->required();
  toytrain->add_option("--variant", toy.variant, "full, no_ctx or etn");
  toytrain->add_option("--steps", toy.steps, "optimizer steps");
  toytrain->add_option("--lr", toy.learning_rate, "Adam learning rate");
  toytrain->add_option("--softmax", toy.softmax, "full or sampled");
  toytrain->add_option("--negatives", toy.negatives, "sampled negatives");
  toytrain->add_option("--positive-cap", toy.positive_cap, "bag-of-words positives");
  toytrain->add_option("--embed-dim", toy.embed, "token embedding size");
  toytrain->add_option("--hidden-dim", toy.hidden, "recurrent state size");
  toytrain->add_option("--projected-dim", toy.projected, "projection size");
  toytrain->add_option("--max-vocab", toy.max_vocab, "vocabulary cap (0: none)");
  toytrain->add_flag("--pad-boundaries", toy.pad_boundaries, "wrap sequences in <s> </s>");
  toytrain->add_option("--out", toy.out, "curve TSV (default stdout)");

  CLI::App *report = app.add_subcommand("report", "full evaluation report with headlines");
  BindCommon(report, &binder);
  BindTraining(report, &binder);
  report->add_flag("--per-layer", per_layer, "one run per layer plus the mixed run");
  report->add_option("--out", out_path, "report file (default stdout)");

  std::vector<const char *> argv{"enteval"};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = ResolveConfig(
        binder.Collect(),
        config_path.empty() ? std::nullopt : std::optional<std::string>(config_path),
        env_data_dir);
    if (datagen->parsed()) {
      CmdDatagen(cfg, out, err);
    } else if (wikient->parsed()) {
      CmdWikient(dump, pairs_out, desc_out, out, err);
    } else if (embed->parsed()) {
      CmdEmbed(cfg, encoder, out_path, out);
    } else if (probe->parsed()) {
      CmdProbe(cfg, embeddings, labels, loss, model_out, out);
    } else if (eval->parsed()) {
      Output o(out_path, out);
      CmdEval(cfg, embeddings, false, *o);
    } else if (toytrain->parsed()) {
      CmdToytrain(cfg, toy, out);
    } else if (report->parsed()) {
      Output o(out_path, out);
      CmdEval(cfg, "", per_layer, *o);
    }
  } catch (const UsageError &e) {
    err << "enteval: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument &e) {
    err << "enteval: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "enteval: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace enteval::cli
