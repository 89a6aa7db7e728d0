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

#include "enteval/dataset.h"

#include <fstream>
#include <stdexcept>

#include "enteval/wikient.h"
#include "json.hpp"
#include "jsonl.h"

namespace enteval {

using nlohmann::json;
using nlohmann::ordered_json;
using internal::ForEachJsonLine;

namespace {

constexpr const char *kTaskNames[] = {"cap", "cerp", "efp",   "et",
                                      "esr", "ert",  "conll", "rare"};

std::ofstream OpenOut(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void PutMention(const MentionContext &m, const char *context_key,
                const char *span_key, ordered_json *j) {
  (*j)[context_key] = m.tokens;
  (*j)[span_key] = {m.span.start, m.span.end};
}

MentionContext GetMention(const json &j, std::string id,
                          const char *context_key, const char *span_key) {
  MentionContext m;
  m.instance_id = std::move(id);
  m.tokens = j.at(context_key).get<std::vector<std::string>>();
  const auto span = j.at(span_key).get<std::vector<std::size_t>>();
  if (span.size() != 2) throw std::invalid_argument("span must have two ends");
  m.span = {span[0], span[1]};
  m.Validate();
  return m;
}

void Emit(std::ofstream &out, const ordered_json &j) {
  out << j.dump() << '\n';
}

}  // namespace

const char *TaskName(Task task) {
  return kTaskNames[static_cast<int>(task)];
}

Task ParseTask(const std::string &name) {
  for (Task t : kAllTasks) {
    if (name == TaskName(t)) return t;
  }
  throw std::invalid_argument("unknown task: " + name);
}

std::size_t LinkingRecord::GoldIndex() const {
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].entity_id == gold) return k;
  }
  throw DataError("instance " + mention.instance_id + ": gold " + gold +
                  " is not among its candidates");
}

std::string MentionEmbeddingId(const std::string &id) { return id; }

std::string PairEmbeddingId(const std::string &id, int side) {
  return id + "#" + std::to_string(side);
}

std::string DescriptionEmbeddingId(const std::string &entity_id) {
  return "desc:" + entity_id;
}

std::string SplitPath(const std::string &dir, const std::string &split) {
  return dir + "/" + split + ".jsonl";
}

void WriteMentions(const std::vector<MentionRecord> &rows,
                   const std::string &path) {
  auto out = OpenOut(path);
  for (const auto &r : rows) {
    ordered_json j;
    j["id"] = r.mention.instance_id;
    PutMention(r.mention, "context", "span", &j);
    j["label"] = r.label;
    Emit(out, j);
  }
}

std::vector<MentionRecord> ReadMentions(const std::string &path) {
  std::vector<MentionRecord> rows;
  ForEachJsonLine(path, [&](const json &j) {
    MentionRecord r;
    r.mention = GetMention(j, j.at("id").get<std::string>(), "context", "span");
    r.label = j.at("label").get<int>();
    if (r.label != 0 && r.label != 1) {
      throw std::invalid_argument("label must be 0 or 1");
    }
    rows.push_back(std::move(r));
  });
  return rows;
}

void WriteTyped(const std::vector<TypedInstance> &rows,
                const std::string &path) {
  auto out = OpenOut(path);
  for (const auto &r : rows) {
    ordered_json j;
    j["id"] = r.mention.instance_id;
    PutMention(r.mention, "context", "span", &j);
    j["types"] = r.gold_types;
    Emit(out, j);
  }
}

std::vector<TypedInstance> ReadTyped(const std::string &path) {
  std::vector<TypedInstance> rows;
  ForEachJsonLine(path, [&](const json &j) {
    TypedInstance r;
    r.mention = GetMention(j, j.at("id").get<std::string>(), "context", "span");
    for (int t : j.at("types").get<std::vector<int>>()) r.gold_types.insert(t);
    try {
      r.Validate();
    } catch (const std::invalid_argument &e) {
      throw DataError(path + ": " + e.what());
    }
    rows.push_back(std::move(r));
  });
  return rows;
}

void WritePairs(const std::vector<PairInstance> &rows,
                const std::string &path) {
  auto out = OpenOut(path);
  for (const auto &r : rows) {
    ordered_json j;
    j["id"] = r.id;
    PutMention(r.left, "context", "span", &j);
    PutMention(r.right, "context2", "span2", &j);
    j["label"] = r.label;
    if (r.group) j["group"] = PairGroupName(*r.group);
    Emit(out, j);
  }
}

std::vector<PairInstance> ReadPairInstances(const std::string &path) {
  std::vector<PairInstance> rows;
  ForEachJsonLine(path, [&](const json &j) {
    PairInstance r;
    r.id = j.at("id").get<std::string>();
    r.left = GetMention(j, PairEmbeddingId(r.id, 1), "context", "span");
    r.right = GetMention(j, PairEmbeddingId(r.id, 2), "context2", "span2");
    r.label = j.at("label").get<int>();
    if (r.label != 0 && r.label != 1) {
      throw std::invalid_argument("label must be 0 or 1");
    }
    if (j.contains("group")) {
      r.group = ParsePairGroup(j.at("group").get<std::string>());
    }
    rows.push_back(std::move(r));
  });
  return rows;
}

void WriteLinking(const std::vector<LinkingRecord> &rows,
                  const std::string &path) {
  auto out = OpenOut(path);
  for (const auto &r : rows) {
    ordered_json j;
    j["id"] = r.mention.instance_id;
    PutMention(r.mention, "context", "span", &j);
    ordered_json cands = ordered_json::array();
    for (const auto &c : r.candidates) {
      ordered_json cj;
      cj["entity_id"] = c.entity_id;
      cj["prior"] = c.prior;
      cands.push_back(std::move(cj));
    }
    j["candidates"] = std::move(cands);
    j["gold"] = r.gold;
    Emit(out, j);
  }
}

std::vector<LinkingRecord> ReadLinking(const std::string &path) {
  std::vector<LinkingRecord> rows;
  ForEachJsonLine(path, [&](const json &j) {
    LinkingRecord r;
    r.mention = GetMention(j, j.at("id").get<std::string>(), "context", "span");
    for (const auto &c : j.at("candidates")) {
      r.candidates.push_back({c.at("entity_id").get<std::string>(),
                              c.at("prior").get<double>()});
    }
    r.gold = j.at("gold").get<std::string>();
    r.GoldIndex();
    rows.push_back(std::move(r));
  });
  return rows;
}

void WriteRelations(const std::vector<RelationRecord> &rows,
                    const std::string &path) {
  auto out = OpenOut(path);
  for (const auto &r : rows) {
    ordered_json j;
    j["id"] = r.id;
    j["entity1"] = r.entity1;
    j["entity2"] = r.entity2;
    j["label"] = r.label;
    j["relation"] = r.relation;
    Emit(out, j);
  }
}

std::vector<RelationRecord> ReadRelations(const std::string &path) {
  std::vector<RelationRecord> rows;
  ForEachJsonLine(path, [&](const json &j) {
    rows.push_back({j.at("id").get<std::string>(),
                    j.at("entity1").get<std::string>(),
                    j.at("entity2").get<std::string>(), j.at("label").get<int>(),
                    j.at("relation").get<std::string>()});
    if (rows.back().label < 0) throw std::invalid_argument("negative label");
  });
  return rows;
}

void WriteSimilarity(const std::vector<SimilarityRecord> &rows,
                     const std::string &path) {
  auto out = OpenOut(path);
  for (const auto &r : rows) {
    ordered_json j;
    j["id"] = r.id;
    j["subset"] = r.subset;
    j["entity1"] = r.entity1;
    j["entity2"] = r.entity2;
    j["score"] = r.score;
    Emit(out, j);
  }
}

std::vector<SimilarityRecord> ReadSimilarity(const std::string &path) {
  std::vector<SimilarityRecord> rows;
  ForEachJsonLine(path, [&](const json &j) {
    rows.push_back({j.at("id").get<std::string>(),
                    j.at("subset").get<std::string>(),
                    j.at("entity1").get<std::string>(),
                    j.at("entity2").get<std::string>(),
                    j.at("score").get<double>()});
  });
  return rows;
}

void WriteDescriptionStore(const std::map<std::string, EntityDescription> &store,
                           const std::string &path) {
  auto out = OpenOut(path);
  for (const auto &[id, d] : store) WriteDescription(d, out);
}

std::map<std::string, EntityDescription> ReadDescriptionStore(
    const std::string &path) {
  return ReadDescriptions(path);
}

}  // namespace enteval
