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

// Task runners: datasets + frozen embeddings + linear probes -> metrics.
//
// Every runner reads embeddings by the ids defined in dataset.h, trains on
// train, early-stops on dev and reports test metrics as percentages. The
// embedding checksum is compared before and after each run.

#ifndef ENTEVAL_TASKS_H_
#define ENTEVAL_TASKS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "enteval/core.h"
#include "enteval/dataset.h"
#include "enteval/embed_io.h"
#include "enteval/probe.h"

namespace enteval {

// A task's dataset as stored on disk.
struct TaskData {
  Task task = Task::kCap;
  SplitRows<PairInstance> pairs;          // cap, cerp
  SplitRows<MentionRecord> mentions;      // efp
  SplitRows<TypedInstance> typed;         // et
  SplitRows<RelationRecord> relations;    // ert
  SplitRows<LinkingRecord> linking;       // conll, rare
  std::vector<SimilarityRecord> similarity;  // esr (test only)
  std::map<std::string, EntityDescription> descriptions;
};

// Reads <dir>/{train,dev,test}.jsonl (test.jsonl only for esr) and
// descriptions.jsonl where the task uses descriptions.
TaskData LoadTaskData(Task task, const std::string &dir);

// One representation an encoder must supply for a task.
struct EmbeddingRequest {
  enum class Kind {
    kMention,      // contextualized: `mention`
    kStatement,    // descriptive encoding of a whole sentence: `tokens`
    kDescription,  // descriptive: `tokens`
  };
  std::string id;
  Kind kind = Kind::kMention;
  MentionContext mention;
  std::vector<std::string> tokens;
};

// Every embedding id a task reads, in first-use order, without duplicates.
std::vector<EmbeddingRequest> EmbeddingRequests(const TaskData &data);

// Word-averaging encoder over all requests. A mention whose span is the
// rare-entity blank averages the rest of its context instead.
EmbeddingSet AvgvecEmbeddings(const std::vector<EmbeddingRequest> &requests,
                              const WordVectorTable &table,
                              AvgvecStats *stats = nullptr);

struct TaskConfig {
  TrainConfig train;
  MixMode mix_mode = MixMode::kSoftmaxScaled;
  bool train_mix = true;             // learn mixing weights jointly
  std::optional<std::size_t> layer;  // single-layer run; empty = mixed
  ThresholdObjective threshold_objective = ThresholdObjective::kF1;
};

// Trains a probe under cfg's layer selection: a fixed single layer, the
// only layer, or jointly learned (or frozen initial) mixing weights. `dev`
// (may be null or empty) drives early stopping.
TrainResult TrainTaskProbe(const ProbeInputs &train, const ProbeInputs *dev,
                           ProbeLoss loss, Eigen::Index n_classes,
                           const TaskConfig &cfg);

struct MetricValue {
  std::string metric;
  double value = 0.0;
};

struct TaskReport {
  std::string task;  // TaskName()
  std::string split = "test";
  std::string metric;  // headline metric
  double value = 0.0;  // percent
  std::vector<MetricValue> components;  // reported alongside the headline
  std::optional<std::size_t> layer;     // empty = mixed
  std::uint64_t seed = 0;
  // Effective layer coefficients per probe (or per similarity run).
  std::map<std::string, Eigen::VectorXd> mix;
  long trainable_parameters = 0;
  std::vector<std::string> notes;

  // Throws std::logic_error when a value leaves its metric's range.
  void Validate() const;
};

// CAP (mean of per-group accuracy, one probe per group) and CERP.
TaskReport RunPairClassification(Task task,
                                 const SplitRows<PairInstance> &data,
                                 const EmbeddingSet &emb,
                                 const TaskConfig &cfg);

// EFP: the statement embedding is the classifier input.
TaskReport RunStatementClassification(const SplitRows<MentionRecord> &data,
                                      const EmbeddingSet &emb,
                                      const TaskConfig &cfg);

// ET: multilabel probe over the types seen in train or dev, thresholds
// tuned on dev, macro F1 on test.
TaskReport RunTyping(const SplitRows<TypedInstance> &data,
                     const EmbeddingSet &emb, const TaskConfig &cfg);

// ESR: Spearman between description cosines and gold scores per subset,
// no trainable parameters. Uses cfg.layer or the uniform layer mean.
TaskReport RunSimilarity(const std::vector<SimilarityRecord> &data,
                         const EmbeddingSet &emb, const TaskConfig &cfg);

// ERT: softmax probe over relation labels on description pair features.
TaskReport RunPairTyping(const SplitRows<RelationRecord> &data,
                         const EmbeddingSet &emb, const TaskConfig &cfg);

// CoNLL: binary probe on (mention, candidate description) pair features;
// prediction = argmax of prior + sigmoid score.
TaskReport RunLinkingConll(const SplitRows<LinkingRecord> &data,
                           const EmbeddingSet &emb, const TaskConfig &cfg);

// Rare: softmax over each instance's four candidates.
TaskReport RunCandidateSelection(const SplitRows<LinkingRecord> &data,
                                 const EmbeddingSet &emb,
                                 const TaskConfig &cfg);

TaskReport RunTask(const TaskData &data, const EmbeddingSet &emb,
                   const TaskConfig &cfg);

// Throws DataError unless 1 <= |candidates| <= 30, priors sum to 1 within
// 1e-9 and the gold is a candidate.
void ValidateCandidateSet(const LinkingRecord &record);

// Index of the highest prior + classifier score, ties to the lowest index.
std::size_t LinkingArgmax(const LinkingRecord &record,
                          const Eigen::Ref<const Eigen::VectorXd> &scores);

// CoNLL predictions of a trained (or untrained) binary model.
std::vector<std::size_t> PredictLinking(
    const std::vector<LinkingRecord> &records, const EmbeddingSet &emb,
    const LinearModel<double> &model, const MixWeights<double> &mix);

// Headline table: CAP CERP EFP ET ESR ERT NED, then Average. A headline
// is present only when all of its components are.
std::vector<MetricValue> Headlines(const std::vector<TaskReport> &reports);

// TSV: task, split, metric, value, layer, seed. Each report contributes its
// headline and component rows; headline rows follow per layer setting;
// "#" lines define the aggregations and carry report notes.
void WriteReportTsv(const std::vector<TaskReport> &reports, std::ostream &out);

}  // namespace enteval

#endif  // ENTEVAL_TASKS_H_
