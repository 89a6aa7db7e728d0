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

// On-disk task datasets: one directory per task holding train.jsonl,
// dev.jsonl and test.jsonl (whichever splits the task has) and, for tasks
// that use descriptions, descriptions.jsonl. ET also keeps types.txt, one
// type name per line.
//
//   mention   {"id","context","span","label"}            EFP
//   typed     {"id","context","span","types"}            ET
//   pair      {"id","context","span","context2","span2","label"[,"group"]}
//                                                        CAP, CERP
//   linking   {"id","context","span","candidates":[{"entity_id","prior"}],
//              "gold"}                                   CoNLL, Rare
//   relation  {"id","entity1","entity2","label","relation"}   ERT
//   similarity {"id","subset","entity1","entity2","score"}    ESR
//
// Embedding ids: a mention is "<id>", the two sides of a pair are "<id>#1"
// and "<id>#2", a description is "desc:<entity_id>".

#ifndef ENTEVAL_DATASET_H_
#define ENTEVAL_DATASET_H_

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "enteval/core.h"

namespace enteval {

inline constexpr const char *kSplits[] = {"train", "dev", "test"};

// Placeholder token marking the entity position in a rare-entity context.
inline constexpr const char *kBlankToken = "**blank**";

template <typename Row>
using SplitRows = std::array<std::vector<Row>, 3>;  // train, dev, test

enum class Task { kCap, kCerp, kEfp, kEt, kEsr, kErt, kConll, kRare };

inline constexpr Task kAllTasks[] = {Task::kCap, Task::kCerp, Task::kEfp,
                                     Task::kEt,  Task::kEsr,  Task::kErt,
                                     Task::kConll, Task::kRare};

const char *TaskName(Task task);  // "cap", "cerp", ...
Task ParseTask(const std::string &name);

struct MentionRecord {
  MentionContext mention;
  int label = 0;  // EFP: 1 = SUPPORTS, 0 = REFUTES
};

struct LinkCandidate {
  std::string entity_id;
  double prior = 0.0;
};

struct LinkingRecord {
  MentionContext mention;
  std::vector<LinkCandidate> candidates;
  std::string gold;

  // Index of the gold candidate; DataError when absent.
  std::size_t GoldIndex() const;
};

struct RelationRecord {
  std::string id;
  std::string entity1;
  std::string entity2;
  int label = 0;
  std::string relation;
};

struct SimilarityRecord {
  std::string id;
  std::string subset;  // "kore", "wikisrs_rel", "wikisrs_sim"
  std::string entity1;
  std::string entity2;
  double score = 0.0;
};

std::string MentionEmbeddingId(const std::string &id);
std::string PairEmbeddingId(const std::string &id, int side);  // side 1 or 2
std::string DescriptionEmbeddingId(const std::string &entity_id);

// Writers emit one compact JSON object per line with keys in the order
// documented above. Readers throw FormatError naming file and line.
void WriteMentions(const std::vector<MentionRecord> &rows,
                   const std::string &path);
std::vector<MentionRecord> ReadMentions(const std::string &path);

// "types" holds indices into the task's types.txt.
void WriteTyped(const std::vector<TypedInstance> &rows, const std::string &path);
std::vector<TypedInstance> ReadTyped(const std::string &path);

void WritePairs(const std::vector<PairInstance> &rows, const std::string &path);
std::vector<PairInstance> ReadPairInstances(const std::string &path);

void WriteLinking(const std::vector<LinkingRecord> &rows,
                  const std::string &path);
std::vector<LinkingRecord> ReadLinking(const std::string &path);

void WriteRelations(const std::vector<RelationRecord> &rows,
                    const std::string &path);
std::vector<RelationRecord> ReadRelations(const std::string &path);

void WriteSimilarity(const std::vector<SimilarityRecord> &rows,
                     const std::string &path);
std::vector<SimilarityRecord> ReadSimilarity(const std::string &path);

void WriteDescriptionStore(const std::map<std::string, EntityDescription> &store,
                           const std::string &path);
// Same format as the wikient description store.
std::map<std::string, EntityDescription> ReadDescriptionStore(
    const std::string &path);

// "<dir>/<split>.jsonl"
std::string SplitPath(const std::string &dir, const std::string &split);

}  // namespace enteval

#endif  // ENTEVAL_DATASET_H_
