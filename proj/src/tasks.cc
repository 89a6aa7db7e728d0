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

#include "enteval/tasks.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace enteval {

namespace {

constexpr const char *kEsrSubsets[] = {"kore", "wikisrs_rel", "wikisrs_sim"};

bool UsesDescriptions(Task task) {
  return task == Task::kEsr || task == Task::kErt || task == Task::kConll ||
         task == Task::kRare;
}

// ---------------------------------------------------------------- inputs

// Accumulates ProbeInputs items, one per distinct embedding id.
class InputsBuilder {
 public:
  InputsBuilder(const EmbeddingSet &emb, FeatureKind kind) : emb_(emb) {
    inputs_.dim = static_cast<Eigen::Index>(emb.dim());
    inputs_.n_layers = static_cast<Eigen::Index>(emb.n_layers());
    inputs_.kind = kind;
  }

  std::size_t Item(const std::string &id) {
    const std::size_t e = emb_.IndexOf(id);
    auto [it, fresh] = items_.try_emplace(e, 0);
    if (fresh) it->second = inputs_.AddItem(emb_.Layers(e));
    return it->second;
  }

  void AddRow(const std::string &first) {
    inputs_.rows.push_back({Item(first), 0});
  }
  void AddRow(const std::string &first, const std::string &second) {
    const std::size_t a = Item(first);
    inputs_.rows.push_back({a, Item(second)});
  }

  ProbeInputs &inputs() { return inputs_; }

 private:
  const EmbeddingSet &emb_;
  ProbeInputs inputs_;
  std::unordered_map<std::size_t, std::size_t> items_;
};

struct MixPlan {
  std::optional<MixWeights<double>> trainable;
  std::optional<MixWeights<double>> fixed;
};

MixWeights<double> InitialMix(MixMode mode, Eigen::Index n_layers) {
  if (mode == MixMode::kSoftmaxScaled) {
    return MixWeights<double>::Uniform(n_layers);
  }
  return {MixMode::kUnnormalized,
          Eigen::VectorXd::Constant(n_layers, 1.0 / static_cast<double>(n_layers)),
          1.0};
}

MixPlan PlanMix(const TaskConfig &cfg, std::size_t n_layers) {
  const auto L = static_cast<Eigen::Index>(n_layers);
  MixPlan plan;
  if (cfg.layer) {
    if (*cfg.layer >= n_layers) {
      throw std::invalid_argument("layer " + std::to_string(*cfg.layer) +
                                  " out of range for " +
                                  std::to_string(n_layers) + " layers");
    }
    plan.fixed = MixWeights<double>::SingleLayer(
        L, static_cast<Eigen::Index>(*cfg.layer));
  } else if (n_layers == 1) {
    plan.fixed = MixWeights<double>::SingleLayer(1, 0);
  } else if (cfg.train_mix) {
    plan.trainable = InitialMix(cfg.mix_mode, L);
  } else {
    plan.fixed = InitialMix(cfg.mix_mode, L);
  }
  return plan;
}

}  // namespace

TrainResult TrainTaskProbe(const ProbeInputs &train, const ProbeInputs *dev,
                           ProbeLoss loss, Eigen::Index n_classes,
                           const TaskConfig &cfg) {
  if (train.rows.empty()) throw DataError("empty training split");
  const MixPlan plan = PlanMix(cfg, static_cast<std::size_t>(train.n_layers));
  if (dev && dev->rows.empty()) dev = nullptr;
  return TrainLinear(train, dev, loss, n_classes, cfg.train, plan.trainable,
                     plan.fixed);
}

namespace {

struct Fit {
  TrainResult result;
  long parameters = 0;
};

Fit TrainProbe(const ProbeInputs &train, const ProbeInputs &dev,
               ProbeLoss loss, Eigen::Index n_classes, const TaskConfig &cfg) {
  Fit fit{TrainTaskProbe(train, &dev, loss, n_classes, cfg), 0};
  fit.parameters = static_cast<long>(fit.result.model.weights.size() +
                                     fit.result.model.bias.size());
  if (!cfg.layer && train.n_layers > 1 && cfg.train_mix) {
    fit.parameters += static_cast<long>(train.n_layers);
    if (cfg.mix_mode == MixMode::kSoftmaxScaled) fit.parameters += 1;
  }
  return fit;
}

// Labels from the first row of each column's probabilities.
std::vector<int> BinaryPredictions(const Eigen::MatrixXd &proba) {
  std::vector<int> out(static_cast<std::size_t>(proba.cols()));
  for (Eigen::Index j = 0; j < proba.cols(); ++j) {
    out[static_cast<std::size_t>(j)] = proba(0, j) > 0.5 ? 1 : 0;
  }
  return out;
}

std::vector<int> ArgmaxPredictions(const Eigen::MatrixXd &proba) {
  std::vector<int> out(static_cast<std::size_t>(proba.cols()));
  for (Eigen::Index j = 0; j < proba.cols(); ++j) {
    Eigen::Index k = 0;
    proba.col(j).maxCoeff(&k);  // first maximum
    out[static_cast<std::size_t>(j)] = static_cast<int>(k);
  }
  return out;
}

double Percent(double fraction) { return 100.0 * fraction; }

// Runs `body` and checks that the embeddings were left untouched.
TaskReport Guarded(const EmbeddingSet &emb,
                   const std::function<TaskReport()> &body) {
  const std::uint64_t before = emb.Checksum();
  TaskReport report = body();
  if (emb.Checksum() != before) {
    throw std::logic_error("task runner modified frozen embeddings");
  }
  report.Validate();
  return report;
}

TaskReport NewReport(Task task, const TaskConfig &cfg) {
  TaskReport r;
  r.task = TaskName(task);
  r.layer = cfg.layer;
  r.seed = cfg.train.seed;
  return r;
}

std::string FormatValue(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string LayerName(const std::optional<std::size_t> &layer) {
  return layer ? std::to_string(*layer) : "mixed";
}

}  // namespace

// ---------------------------------------------------------------- loading

TaskData LoadTaskData(Task task, const std::string &dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("task directory not found: " + dir);
  }
  TaskData data;
  data.task = task;
  if (task == Task::kEsr) {
    data.similarity = ReadSimilarity(SplitPath(dir, "test"));
  } else {
    for (std::size_t s = 0; s < 3; ++s) {
      const std::string path = SplitPath(dir, kSplits[s]);
      switch (task) {
        case Task::kCap:
        case Task::kCerp:
          data.pairs[s] = ReadPairInstances(path);
          break;
        case Task::kEfp:
          data.mentions[s] = ReadMentions(path);
          break;
        case Task::kEt:
          data.typed[s] = ReadTyped(path);
          break;
        case Task::kErt:
          data.relations[s] = ReadRelations(path);
          break;
        case Task::kConll:
        case Task::kRare:
          data.linking[s] = ReadLinking(path);
          break;
        case Task::kEsr:
          break;
      }
    }
  }
  if (UsesDescriptions(task)) {
    data.descriptions = ReadDescriptionStore(dir + "/descriptions.jsonl");
  }
  return data;
}

std::vector<EmbeddingRequest> EmbeddingRequests(const TaskData &data) {
  std::vector<EmbeddingRequest> out;
  std::set<std::string> seen;
  auto mention = [&](const MentionContext &m) {
    if (seen.insert(m.instance_id).second) {
      out.push_back({m.instance_id, EmbeddingRequest::Kind::kMention, m, {}});
    }
  };
  auto description = [&](const std::string &entity) {
    const std::string id = DescriptionEmbeddingId(entity);
    if (!seen.insert(id).second) return;
    auto it = data.descriptions.find(entity);
    if (it == data.descriptions.end()) {
      throw DataError("no description for entity " + entity);
    }
    out.push_back(
        {id, EmbeddingRequest::Kind::kDescription, {}, it->second.tokens});
  };
  for (std::size_t s = 0; s < 3; ++s) {
    for (const auto &p : data.pairs[s]) {
      mention(p.left);
      mention(p.right);
    }
    for (const auto &m : data.mentions[s]) {
      const std::string id = MentionEmbeddingId(m.mention.instance_id);
      if (seen.insert(id).second) {
        out.push_back(
            {id, EmbeddingRequest::Kind::kStatement, m.mention, m.mention.tokens});
      }
    }
    for (const auto &t : data.typed[s]) mention(t.mention);
    for (const auto &r : data.relations[s]) {
      description(r.entity1);
      description(r.entity2);
    }
    for (const auto &l : data.linking[s]) {
      mention(l.mention);
      for (const auto &c : l.candidates) description(c.entity_id);
    }
  }
  for (const auto &r : data.similarity) {
    description(r.entity1);
    description(r.entity2);
  }
  return out;
}

EmbeddingSet AvgvecEmbeddings(const std::vector<EmbeddingRequest> &requests,
                              const WordVectorTable &table,
                              AvgvecStats *stats) {
  std::vector<std::string> ids;
  ids.reserve(requests.size());
  for (const auto &r : requests) ids.push_back(r.id);
  EmbeddingSet set(std::move(ids), 1, table.dim);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto &r = requests[i];
    Eigen::VectorXf v;
    if (r.kind != EmbeddingRequest::Kind::kMention) {
      v = AverageWordVectors(table, r.tokens, stats);
    } else {
      const auto span = r.mention.MentionTokens();
      if (span.size() == 1 && span[0] == kBlankToken) {
        std::vector<std::string> rest;
        for (const auto &t : r.mention.tokens) {
          if (t != kBlankToken) rest.push_back(t);
        }
        v = AverageWordVectors(table, rest, stats);
      } else {
        v = AvgvecEncodeMention(table, r.mention, stats);
      }
    }
    set.MutableVector(i, 0) = v;
  }
  return set;
}

// ---------------------------------------------------------------- reports

void TaskReport::Validate() const {
  auto check = [&](const std::string &metric, double v) {
    const bool correlation = metric.rfind("spearman", 0) == 0;
    const double lo = correlation ? -100.0 : 0.0;
    if (!std::isfinite(v) || v < lo || v > 100.0) {
      throw std::logic_error(task + " " + metric + " out of range: " +
                             std::to_string(v));
    }
  };
  check(metric, value);
  for (const auto &c : components) check(c.metric, c.value);
}

// ---------------------------------------------------------------- runners

TaskReport RunPairClassification(Task task,
                                 const SplitRows<PairInstance> &data,
                                 const EmbeddingSet &emb,
                                 const TaskConfig &cfg) {
  if (task != Task::kCap && task != Task::kCerp) {
    throw std::invalid_argument("pair classification runs cap or cerp");
  }
  return Guarded(emb, [&] {
    TaskReport report = NewReport(task, cfg);
    report.metric = "accuracy";
    // CAP trains one probe per group; CERP has a single group.
    std::vector<std::optional<PairGroup>> groups;
    if (task == Task::kCap) {
      for (const auto &split : data) {
        for (const auto &p : split) {
          if (!p.group) throw DataError("cap instance " + p.id + " has no group");
        }
      }
      groups = {PairGroup::kSame, PairGroup::kNext};
    } else {
      groups = {std::nullopt};
    }
    double sum = 0.0;
    for (const auto &group : groups) {
      std::array<InputsBuilder, 3> b{InputsBuilder(emb, FeatureKind::kPair),
                                     InputsBuilder(emb, FeatureKind::kPair),
                                     InputsBuilder(emb, FeatureKind::kPair)};
      for (std::size_t s = 0; s < 3; ++s) {
        for (const auto &p : data[s]) {
          if (group && p.group != group) continue;
          b[s].AddRow(p.left.instance_id, p.right.instance_id);
          b[s].inputs().labels.push_back(p.label);
        }
      }
      const std::string name = group ? PairGroupName(*group) : TaskName(task);
      if (b[2].inputs().rows.empty()) throw DataError(name + ": empty test split");
      const Fit fit = TrainProbe(b[0].inputs(), b[1].inputs(),
                                 ProbeLoss::kBinaryLog, 1, cfg);
      const auto pred = BinaryPredictions(PredictRows(
          b[2].inputs(), fit.result.model, fit.result.mix, ProbeLoss::kBinaryLog));
      const double acc = Percent(Accuracy(pred, b[2].inputs().labels));
      sum += acc;
      report.mix[name] = fit.result.mix.Coefficients();
      report.trainable_parameters += fit.parameters;
      if (group) report.components.push_back({"accuracy_" + name, acc});
    }
    report.value = sum / static_cast<double>(groups.size());
    return report;
  });
}

TaskReport RunStatementClassification(const SplitRows<MentionRecord> &data,
                                      const EmbeddingSet &emb,
                                      const TaskConfig &cfg) {
  return Guarded(emb, [&] {
    TaskReport report = NewReport(Task::kEfp, cfg);
    report.metric = "accuracy";
    std::array<InputsBuilder, 3> b{InputsBuilder(emb, FeatureKind::kSingle),
                                   InputsBuilder(emb, FeatureKind::kSingle),
                                   InputsBuilder(emb, FeatureKind::kSingle)};
    for (std::size_t s = 0; s < 3; ++s) {
      for (const auto &m : data[s]) {
        b[s].AddRow(MentionEmbeddingId(m.mention.instance_id));
        b[s].inputs().labels.push_back(m.label);
      }
    }
    if (b[2].inputs().rows.empty()) throw DataError("efp: empty test split");
    const Fit fit =
        TrainProbe(b[0].inputs(), b[1].inputs(), ProbeLoss::kBinaryLog, 1, cfg);
    const auto pred = BinaryPredictions(PredictRows(
        b[2].inputs(), fit.result.model, fit.result.mix, ProbeLoss::kBinaryLog));
    report.value = Percent(Accuracy(pred, b[2].inputs().labels));
    report.mix["efp"] = fit.result.mix.Coefficients();
    report.trainable_parameters = fit.parameters;
    return report;
  });
}

TaskReport RunTyping(const SplitRows<TypedInstance> &data,
                     const EmbeddingSet &emb, const TaskConfig &cfg) {
  return Guarded(emb, [&] {
    TaskReport report = NewReport(Task::kEt, cfg);
    report.metric = "f1";
    // Output units only for types that can be learned or tuned.
    std::map<int, int> unit;
    for (std::size_t s = 0; s < 2; ++s) {
      for (const auto &t : data[s]) {
        t.Validate();
        for (int type : t.gold_types) unit.emplace(type, 0);
      }
    }
    if (unit.empty()) throw DataError("et: no types in train or dev");
    std::vector<int> type_of_unit;
    for (auto &[type, k] : unit) {
      k = static_cast<int>(type_of_unit.size());
      type_of_unit.push_back(type);
    }
    std::array<InputsBuilder, 3> b{InputsBuilder(emb, FeatureKind::kSingle),
                                   InputsBuilder(emb, FeatureKind::kSingle),
                                   InputsBuilder(emb, FeatureKind::kSingle)};
    for (std::size_t s = 0; s < 3; ++s) {
      for (const auto &t : data[s]) {
        t.Validate();
        b[s].AddRow(MentionEmbeddingId(t.mention.instance_id));
        std::set<int> units;
        for (int type : t.gold_types) {
          auto it = unit.find(type);
          if (it != unit.end()) units.insert(it->second);
        }
        b[s].inputs().label_sets.push_back(std::move(units));
      }
    }
    if (b[1].inputs().rows.empty() || b[2].inputs().rows.empty()) {
      throw DataError("et: dev and test splits must be nonempty");
    }
    const auto n_units = static_cast<Eigen::Index>(type_of_unit.size());
    const Fit fit = TrainProbe(b[0].inputs(), b[1].inputs(),
                               ProbeLoss::kMultilabelBinaryLog, n_units, cfg);
    const auto predict = [&](const ProbeInputs &in) {
      return Eigen::MatrixXd(PredictRows(in, fit.result.model, fit.result.mix,
                                         ProbeLoss::kMultilabelBinaryLog)
                                 .transpose());
    };
    const std::vector<double> thresholds = TuneThresholds(
        predict(b[1].inputs()), b[1].inputs().label_sets, cfg.threshold_objective);
    const auto units = ApplyThresholds(predict(b[2].inputs()), thresholds);
    std::vector<std::set<int>> predicted(units.size()), gold;
    for (std::size_t i = 0; i < units.size(); ++i) {
      for (int k : units[i]) predicted[i].insert(type_of_unit[k]);
    }
    for (const auto &t : data[2]) gold.push_back(t.gold_types);
    const PrecisionRecallF1 prf = MultilabelF1(predicted, gold);
    report.value = Percent(prf.f1);
    report.components = {{"precision", Percent(prf.precision)},
                         {"recall", Percent(prf.recall)}};
    report.mix["et"] = fit.result.mix.Coefficients();
    report.trainable_parameters = fit.parameters;
    report.notes.push_back("et: " + std::to_string(type_of_unit.size()) +
                           " output types (seen in train or dev)");
    return report;
  });
}

TaskReport RunSimilarity(const std::vector<SimilarityRecord> &data,
                         const EmbeddingSet &emb, const TaskConfig &cfg) {
  return Guarded(emb, [&] {
    TaskReport report = NewReport(Task::kEsr, cfg);
    report.metric = "spearman";
    const auto L = static_cast<Eigen::Index>(emb.n_layers());
    if (cfg.layer && *cfg.layer >= emb.n_layers()) {
      throw std::invalid_argument("layer out of range");
    }
    const Eigen::VectorXd coef =
        (cfg.layer ? MixWeights<double>::SingleLayer(
                         L, static_cast<Eigen::Index>(*cfg.layer))
                   : MixWeights<double>::Uniform(L))
            .Coefficients();
    auto vec = [&](const std::string &entity) -> Eigen::VectorXd {
      return emb.Layers(emb.IndexOf(DescriptionEmbeddingId(entity)))
                 .cast<double>() *
             coef;
    };
    std::vector<std::string> subsets;
    for (const char *s : kEsrSubsets) subsets.push_back(s);
    for (const auto &r : data) {
      if (std::find(subsets.begin(), subsets.end(), r.subset) == subsets.end()) {
        throw DataError("esr: unknown subset " + r.subset);
      }
    }
    double sum = 0.0;
    int present = 0;
    for (const auto &subset : subsets) {
      std::vector<double> pred, gold;
      long excluded = 0, total = 0;
      for (const auto &r : data) {
        if (r.subset != subset) continue;
        ++total;
        const Eigen::VectorXd a = vec(r.entity1), b = vec(r.entity2);
        const std::optional<double> c = Cosine(a, b);
        if (!c) {
          ++excluded;
          continue;
        }
        pred.push_back(*c);
        gold.push_back(r.score);
      }
      if (total == 0) {
        report.notes.push_back("esr: subset " + subset + " absent");
        continue;
      }
      if (excluded > 0) {
        report.notes.push_back("esr: " + subset + " excluded " +
                               std::to_string(excluded) + " of " +
                               std::to_string(total) +
                               " pairs with a zero-norm embedding");
      }
      double rho = 0.0;
      try {
        rho = Spearman(pred, gold);
      } catch (const std::exception &e) {
        throw DataError("esr: spearman undefined on " + subset + ": " + e.what());
      }
      report.components.push_back({"spearman_" + subset, Percent(rho)});
      sum += Percent(rho);
      ++present;
    }
    if (present == 0) throw DataError("esr: no similarity pairs");
    report.value = sum / present;
    report.mix["esr"] = coef;
    report.trainable_parameters = 0;
    return report;
  });
}

TaskReport RunPairTyping(const SplitRows<RelationRecord> &data,
                         const EmbeddingSet &emb, const TaskConfig &cfg) {
  return Guarded(emb, [&] {
    TaskReport report = NewReport(Task::kErt, cfg);
    report.metric = "accuracy";
    std::set<int> train_labels;
    for (const auto &r : data[0]) train_labels.insert(r.label);
    if (train_labels.empty()) throw DataError("ert: empty training split");
    const int n_classes = *train_labels.rbegin() + 1;
    std::array<InputsBuilder, 3> b{InputsBuilder(emb, FeatureKind::kPair),
                                   InputsBuilder(emb, FeatureKind::kPair),
                                   InputsBuilder(emb, FeatureKind::kPair)};
    for (std::size_t s = 0; s < 3; ++s) {
      for (const auto &r : data[s]) {
        if (!train_labels.count(r.label)) {
          throw DataError("ert: unknown relation id " + std::to_string(r.label) +
                          " (" + r.relation + ") in " + kSplits[s]);
        }
        b[s].AddRow(DescriptionEmbeddingId(r.entity1),
                    DescriptionEmbeddingId(r.entity2));
        b[s].inputs().labels.push_back(r.label);
      }
    }
    if (b[2].inputs().rows.empty()) throw DataError("ert: empty test split");
    const Fit fit = TrainProbe(b[0].inputs(), b[1].inputs(),
                               ProbeLoss::kCrossEntropy, n_classes, cfg);
    const auto pred = ArgmaxPredictions(PredictRows(
        b[2].inputs(), fit.result.model, fit.result.mix, ProbeLoss::kCrossEntropy));
    report.value = Percent(Accuracy(pred, b[2].inputs().labels));
    report.mix["ert"] = fit.result.mix.Coefficients();
    report.trainable_parameters = fit.parameters;
    report.notes.push_back("ert: " + std::to_string(train_labels.size()) +
                           " relation types");
    return report;
  });
}

void ValidateCandidateSet(const LinkingRecord &record) {
  const std::size_t n = record.candidates.size();
  const std::string &id = record.mention.instance_id;
  if (n < 1 || n > 30) {
    throw DataError("instance " + id + ": " + std::to_string(n) +
                    " candidates (expected 1 to 30)");
  }
  double sum = 0.0;
  for (const auto &c : record.candidates) sum += c.prior;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError("instance " + id + ": priors sum to " + std::to_string(sum));
  }
  record.GoldIndex();
}

std::size_t LinkingArgmax(const LinkingRecord &record,
                          const Eigen::Ref<const Eigen::VectorXd> &scores) {
  if (static_cast<std::size_t>(scores.size()) != record.candidates.size()) {
    throw std::invalid_argument("LinkingArgmax: one score per candidate");
  }
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < record.candidates.size(); ++k) {
    const double s = record.candidates[k].prior + scores(static_cast<Eigen::Index>(k));
    if (s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

namespace {

// One (mention, candidate) row per candidate; labels mark the gold.
void AddLinkingRows(const LinkingRecord &r, InputsBuilder *b) {
  for (const auto &c : r.candidates) {
    b->AddRow(MentionEmbeddingId(r.mention.instance_id),
              DescriptionEmbeddingId(c.entity_id));
    b->inputs().labels.push_back(c.entity_id == r.gold ? 1 : 0);
  }
}

}  // namespace

std::vector<std::size_t> PredictLinking(
    const std::vector<LinkingRecord> &records, const EmbeddingSet &emb,
    const LinearModel<double> &model, const MixWeights<double> &mix) {
  InputsBuilder b(emb, FeatureKind::kPair);
  for (const auto &r : records) AddLinkingRows(r, &b);
  std::vector<std::size_t> out;
  if (records.empty()) return out;
  const Eigen::MatrixXd p =
      PredictRows(b.inputs(), model, mix, ProbeLoss::kBinaryLog);
  Eigen::Index offset = 0;
  for (const auto &r : records) {
    const auto n = static_cast<Eigen::Index>(r.candidates.size());
    out.push_back(LinkingArgmax(r, p.row(0).segment(offset, n).transpose()));
    offset += n;
  }
  return out;
}

TaskReport RunLinkingConll(const SplitRows<LinkingRecord> &data,
                           const EmbeddingSet &emb, const TaskConfig &cfg) {
  return Guarded(emb, [&] {
    TaskReport report = NewReport(Task::kConll, cfg);
    report.metric = "accuracy";
    std::array<InputsBuilder, 2> b{InputsBuilder(emb, FeatureKind::kPair),
                                   InputsBuilder(emb, FeatureKind::kPair)};
    for (std::size_t s = 0; s < 3; ++s) {
      for (const auto &r : data[s]) {
        ValidateCandidateSet(r);
        if (s < 2) AddLinkingRows(r, &b[s]);
      }
    }
    if (data[2].empty()) throw DataError("conll: empty test split");
    const Fit fit =
        TrainProbe(b[0].inputs(), b[1].inputs(), ProbeLoss::kBinaryLog, 1, cfg);
    const auto pred =
        PredictLinking(data[2], emb, fit.result.model, fit.result.mix);
    std::size_t hits = 0, prior_hits = 0;
    for (std::size_t i = 0; i < data[2].size(); ++i) {
      const auto &r = data[2][i];
      const std::size_t gold = r.GoldIndex();
      if (pred[i] == gold) ++hits;
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(
          static_cast<Eigen::Index>(r.candidates.size()));
      if (LinkingArgmax(r, zero) == gold) ++prior_hits;
    }
    const double n = static_cast<double>(data[2].size());
    report.value = Percent(hits / n);
    report.components.push_back({"prior_accuracy", Percent(prior_hits / n)});
    report.mix["conll"] = fit.result.mix.Coefficients();
    report.trainable_parameters = fit.parameters;
    return report;
  });
}

TaskReport RunCandidateSelection(const SplitRows<LinkingRecord> &data,
                                 const EmbeddingSet &emb,
                                 const TaskConfig &cfg) {
  return Guarded(emb, [&] {
    TaskReport report = NewReport(Task::kRare, cfg);
    report.metric = "accuracy";
    std::array<InputsBuilder, 3> b{InputsBuilder(emb, FeatureKind::kPair),
                                   InputsBuilder(emb, FeatureKind::kPair),
                                   InputsBuilder(emb, FeatureKind::kPair)};
    for (std::size_t s = 0; s < 3; ++s) {
      auto &in = b[s].inputs();
      in.group_offsets.push_back(0);
      for (const auto &r : data[s]) {
        if (r.candidates.size() != 4) {
          throw DataError("rare instance " + r.mention.instance_id + " has " +
                          std::to_string(r.candidates.size()) +
                          " candidates (expected 4)");
        }
        for (const auto &c : r.candidates) {
          b[s].AddRow(MentionEmbeddingId(r.mention.instance_id),
                      DescriptionEmbeddingId(c.entity_id));
        }
        in.group_offsets.push_back(in.rows.size());
        in.labels.push_back(static_cast<int>(r.GoldIndex()));
      }
    }
    if (data[2].empty()) throw DataError("rare: empty test split");
    if (data[1].empty()) b[1].inputs().group_offsets.clear();
    const Fit fit = TrainProbe(b[0].inputs(), b[1].inputs(),
                               ProbeLoss::kListwiseCrossEntropy, 1, cfg);
    const Eigen::MatrixXd p = PredictRows(b[2].inputs(), fit.result.model,
                                          fit.result.mix,
                                          ProbeLoss::kListwiseCrossEntropy);
    std::size_t hits = 0;
    for (std::size_t g = 0; g < data[2].size(); ++g) {
      Eigen::Index k = 0;
      p.row(0).segment(static_cast<Eigen::Index>(4 * g), 4).maxCoeff(&k);
      if (static_cast<int>(k) == b[2].inputs().labels[g]) ++hits;
    }
    report.value = Percent(static_cast<double>(hits) / data[2].size());
    report.mix["rare"] = fit.result.mix.Coefficients();
    report.trainable_parameters = fit.parameters;
    return report;
  });
}

TaskReport RunTask(const TaskData &data, const EmbeddingSet &emb,
                   const TaskConfig &cfg) {
  switch (data.task) {
    case Task::kCap:
    case Task::kCerp:
      return RunPairClassification(data.task, data.pairs, emb, cfg);
    case Task::kEfp:
      return RunStatementClassification(data.mentions, emb, cfg);
    case Task::kEt:
      return RunTyping(data.typed, emb, cfg);
    case Task::kEsr:
      return RunSimilarity(data.similarity, emb, cfg);
    case Task::kErt:
      return RunPairTyping(data.relations, emb, cfg);
    case Task::kConll:
      return RunLinkingConll(data.linking, emb, cfg);
    case Task::kRare:
      return RunCandidateSelection(data.linking, emb, cfg);
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------- output

std::vector<MetricValue> Headlines(const std::vector<TaskReport> &reports) {
  std::map<std::string, double> by_task;
  for (const auto &r : reports) by_task[r.task] = r.value;
  auto get = [&](const char *task) -> std::optional<double> {
    auto it = by_task.find(task);
    if (it == by_task.end()) return std::nullopt;
    return it->second;
  };
  std::vector<MetricValue> out;
  const std::pair<const char *, const char *> direct[] = {
      {"CAP", "cap"}, {"CERP", "cerp"}, {"EFP", "efp"},
      {"ET", "et"},   {"ESR", "esr"},   {"ERT", "ert"}};
  for (const auto &[name, task] : direct) {
    if (auto v = get(task)) out.push_back({name, *v});
  }
  const auto conll = get("conll"), rare = get("rare");
  if (conll && rare) out.push_back({"NED", (*conll + *rare) / 2.0});
  if (out.size() == 7) {
    double sum = 0.0;
    for (const auto &h : out) sum += h.value;
    out.push_back({"Average", sum / 7.0});
  }
  return out;
}

void WriteReportTsv(const std::vector<TaskReport> &reports, std::ostream &out) {
  out << "task\tsplit\tmetric\tvalue\tlayer\tseed\n";
  for (const auto &r : reports) {
    const std::string tail =
        "\t" + LayerName(r.layer) + "\t" + std::to_string(r.seed) + "\n";
    out << r.task << '\t' << r.split << '\t' << r.metric << '\t'
        << FormatValue(r.value) << tail;
    for (const auto &c : r.components) {
      out << r.task << '\t' << r.split << '\t' << c.metric << '\t'
          << FormatValue(c.value) << tail;
    }
  }
  // Headlines per layer setting: numbered layers in order, then mixed.
  std::map<std::pair<bool, std::size_t>, std::vector<TaskReport>> groups;
  for (const auto &r : reports) {
    groups[{!r.layer.has_value(), r.layer.value_or(0)}].push_back(r);
  }
  for (const auto &[key, group] : groups) {
    const std::uint64_t seed = group.front().seed;
    for (const auto &h : Headlines(group)) {
      out << h.metric << "\ttest\theadline\t" << FormatValue(h.value) << '\t'
          << LayerName(group.front().layer) << '\t' << seed << '\n';
    }
  }
  out << "# values are percentages on the test split\n"
         "# CAP = mean(accuracy_same, accuracy_next)\n"
         "# ESR = mean of spearman_kore, spearman_wikisrs_rel, "
         "spearman_wikisrs_sim\n"
         "# NED = mean(conll accuracy, rare accuracy); equal weighting of "
         "conll and rare is an assumption\n"
         "# Average = mean(CAP, CERP, EFP, ET, ESR, ERT, NED)\n";
  for (const auto &r : reports) {
    for (const auto &[probe, coef] : r.mix) {
      out << "# mix " << r.task << ' ' << probe << " layer="
          << LayerName(r.layer) << ':';
      for (Eigen::Index l = 0; l < coef.size(); ++l) {
        out << ' ' << FormatValue(coef(l));
      }
      out << '\n';
    }
    for (const auto &n : r.notes) {
      out << "# " << n << " (layer=" << LayerName(r.layer) << ")\n";
    }
  }
}

}  // namespace enteval
