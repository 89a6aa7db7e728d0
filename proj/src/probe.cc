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

#include "enteval/probe.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace enteval {

const char *MixModeName(MixMode mode) {
  return mode == MixMode::kSoftmaxScaled ? "softmax_scaled" : "unnormalized";
}

MixMode ParseMixMode(const std::string &name) {
  if (name == "softmax_scaled") return MixMode::kSoftmaxScaled;
  if (name == "unnormalized") return MixMode::kUnnormalized;
  throw std::invalid_argument("unknown mixing mode: " + name);
}

const char *ProbeLossName(ProbeLoss loss) {
  switch (loss) {
    case ProbeLoss::kBinaryLog:
      return "binary_log";
    case ProbeLoss::kCrossEntropy:
      return "cross_entropy";
    case ProbeLoss::kMultilabelBinaryLog:
      return "multilabel_binary_log";
    case ProbeLoss::kListwiseCrossEntropy:
      return "listwise_cross_entropy";
  }
  return "?";
}

MatrixX<float> MixLayers(const EmbeddingSet &set, const MixWeights<float> &w) {
  if (static_cast<std::size_t>(w.n_layers()) != set.n_layers()) {
    throw std::invalid_argument(
        "MixLayers: set has " + std::to_string(set.n_layers()) +
        " layers but " + std::to_string(w.n_layers()) + " mixing weights");
  }
  const VectorX<float> c = w.Coefficients();
  MatrixX<float> out(set.dim(), set.n_instances());
  for (std::size_t i = 0; i < set.n_instances(); ++i) {
    out.col(i) = set.Layers(i) * c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ProbeInputs

std::size_t ProbeInputs::n_examples(ProbeLoss loss) const {
  if (loss == ProbeLoss::kListwiseCrossEntropy) {
    return group_offsets.empty() ? 0 : group_offsets.size() - 1;
  }
  return rows.size();
}

ProbeInputs ProbeInputs::FromFeatures(const Eigen::MatrixXd &features) {
  ProbeInputs in;
  in.dim = features.rows();
  in.n_layers = 1;
  in.storage.assign(features.data(), features.data() + features.size());
  in.rows.resize(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    in.rows[j].first = static_cast<std::size_t>(j);
  }
  return in;
}

void ProbeInputs::Validate(ProbeLoss loss, Eigen::Index n_classes) const {
  const std::size_t items = n_items();
  for (const auto &r : rows) {
    if (r.first >= items || (kind == FeatureKind::kPair && r.second >= items)) {
      throw std::invalid_argument("ProbeInputs: row references missing item");
    }
  }
  switch (loss) {
    case ProbeLoss::kBinaryLog:
      if (labels.size() != rows.size()) {
        throw std::invalid_argument("ProbeInputs: one label per row required");
      }
      for (int y : labels) {
        if (y != 0 && y != 1) {
          throw std::invalid_argument("ProbeInputs: binary label not in {0,1}");
        }
      }
      break;
    case ProbeLoss::kCrossEntropy:
      if (labels.size() != rows.size()) {
        throw std::invalid_argument("ProbeInputs: one label per row required");
      }
      for (int y : labels) {
        if (y < 0 || y >= n_classes) {
          throw std::invalid_argument("ProbeInputs: class label out of range");
        }
      }
      break;
    case ProbeLoss::kMultilabelBinaryLog:
      if (label_sets.size() != rows.size()) {
        throw std::invalid_argument("ProbeInputs: one label set per row required");
      }
      for (const auto &s : label_sets) {
        if (!s.empty() && (*s.begin() < 0 || *s.rbegin() >= n_classes)) {
          throw std::invalid_argument("ProbeInputs: type label out of range");
        }
      }
      break;
    case ProbeLoss::kListwiseCrossEntropy: {
      if (group_offsets.size() < 2 || group_offsets.front() != 0 ||
          group_offsets.back() != rows.size()) {
        throw std::invalid_argument("ProbeInputs: malformed group offsets");
      }
      if (labels.size() != group_offsets.size() - 1) {
        throw std::invalid_argument("ProbeInputs: one label per group required");
      }
      for (std::size_t g = 0; g + 1 < group_offsets.size(); ++g) {
        const std::size_t size = group_offsets[g + 1] - group_offsets[g];
        if (size == 0 || labels[g] < 0 ||
            static_cast<std::size_t>(labels[g]) >= size) {
          throw std::invalid_argument("ProbeInputs: bad listwise group");
        }
      }
      break;
    }
  }
}

Eigen::MatrixXd MixItems(const ProbeInputs &inputs,
                         const Eigen::VectorXd &coefficients) {
  if (coefficients.size() != inputs.n_layers) {
    throw std::invalid_argument("MixItems: layer count mismatch");
  }
  const std::size_t n = inputs.n_items();
  Eigen::MatrixXd out(inputs.dim, n);
  for (std::size_t k = 0; k < n; ++k) out.col(k) = inputs.Item(k) * coefficients;
  return out;
}

Eigen::MatrixXd BuildFeatures(const ProbeInputs &inputs,
                              const Eigen::MatrixXd &mixed,
                              std::span<const std::size_t> rows) {
  Eigen::MatrixXd x(inputs.feature_dim(), rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto &r = inputs.rows[rows[j]];
    if (inputs.kind == FeatureKind::kPair) {
      x.col(j) = MakePairFeature(mixed.col(r.first), mixed.col(r.second));
    } else {
      x.col(j) = mixed.col(r.first);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// ProbeObjective

namespace {

double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Accumulates loss and dLoss/dz over a set of columns of `z`.
double LossAndLogitGrad(ProbeLoss loss, const ProbeInputs &inputs,
                        const Eigen::MatrixXd &z,
                        std::span<const std::size_t> rows,
                        std::span<const std::size_t> groups,
                        std::span<const std::size_t> group_starts,
                        Eigen::MatrixXd *dz) {
  double total = 0.0;
  dz->setZero(z.rows(), z.cols());
  switch (loss) {
    case ProbeLoss::kBinaryLog:
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const double y = inputs.labels[rows[j]];
        total += Softplus(z(0, j)) - y * z(0, j);
        (*dz)(0, j) = Sigmoid(z(0, j)) - y;
      }
      break;
    case ProbeLoss::kMultilabelBinaryLog:
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto &gold = inputs.label_sets[rows[j]];
        for (Eigen::Index c = 0; c < z.rows(); ++c) {
          const double y = gold.count(static_cast<int>(c)) ? 1.0 : 0.0;
          total += Softplus(z(c, j)) - y * z(c, j);
          (*dz)(c, j) = Sigmoid(z(c, j)) - y;
        }
      }
      break;
    case ProbeLoss::kCrossEntropy:
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const int y = inputs.labels[rows[j]];
        const double m = z.col(j).maxCoeff();
        Eigen::VectorXd e = (z.col(j).array() - m).exp().matrix();
        const double s = e.sum();
        total += m + std::log(s) - z(y, j);
        dz->col(j) = e / s;
        (*dz)(y, j) -= 1.0;
      }
      break;
    case ProbeLoss::kListwiseCrossEntropy:
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const std::size_t begin = group_starts[g];
        const std::size_t end = group_starts[g + 1];
        const std::size_t y = begin + static_cast<std::size_t>(
                                          inputs.labels[groups[g]]);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = begin; j < end; ++j) m = std::max(m, z(0, j));
        double s = 0.0;
        for (std::size_t j = begin; j < end; ++j) s += std::exp(z(0, j) - m);
        total += m + std::log(s) - z(0, y);
        for (std::size_t j = begin; j < end; ++j) {
          (*dz)(0, j) = std::exp(z(0, j) - m) / s;
        }
        (*dz)(0, y) -= 1.0;
      }
      break;
  }
  return total;
}

}  // namespace

ProbeObjective::ProbeObjective(const ProbeInputs &inputs, ProbeLoss loss,
                               Eigen::Index n_classes, double l2,
                               const MixWeights<double> &mix, bool train_mix)
    : inputs_(inputs),
      loss_(loss),
      n_classes_(loss == ProbeLoss::kBinaryLog ||
                         loss == ProbeLoss::kListwiseCrossEntropy
                     ? 1
                     : n_classes),
      l2_(l2),
      fixed_mix_(mix),
      train_mix_(train_mix),
      n_features_(inputs.feature_dim()) {
  if (mix.n_layers() != inputs.n_layers) {
    throw std::invalid_argument(
        "ProbeObjective: inputs have " + std::to_string(inputs.n_layers) +
        " layers but mixing weights cover " + std::to_string(mix.n_layers()));
  }
  inputs.Validate(loss, n_classes);
  if (!train_mix_) {
    std::vector<std::size_t> all(inputs.rows.size());
    std::iota(all.begin(), all.end(), 0);
    frozen_features_ =
        BuildFeatures(inputs, MixItems(inputs, fixed_mix_.Coefficients()), all);
  }
}

Eigen::Index ProbeObjective::n_params() const {
  Eigen::Index n = n_classes_ * n_features_ + n_classes_;
  if (train_mix_) {
    n += inputs_.n_layers;
    if (fixed_mix_.mode == MixMode::kSoftmaxScaled) n += 1;
  }
  return n;
}

Eigen::VectorXd ProbeObjective::Pack(const LinearModel<double> &model,
                                     const MixWeights<double> &mix) const {
  Eigen::VectorXd p(n_params());
  const Eigen::Index nw = n_classes_ * n_features_;
  p.head(nw) = model.weights.reshaped();
  p.segment(nw, n_classes_) = model.bias;
  if (train_mix_) {
    p.segment(nw + n_classes_, inputs_.n_layers) = mix.raw;
    if (mix.mode == MixMode::kSoftmaxScaled) p(p.size() - 1) = mix.scale;
  }
  return p;
}

void ProbeObjective::Unpack(const Eigen::VectorXd &params,
                            LinearModel<double> *model,
                            MixWeights<double> *mix) const {
  const Eigen::Index nw = n_classes_ * n_features_;
  model->weights = params.head(nw).reshaped(n_classes_, n_features_);
  model->bias = params.segment(nw, n_classes_);
  *mix = fixed_mix_;
  if (train_mix_) {
    mix->raw = params.segment(nw + n_classes_, inputs_.n_layers);
    if (mix->mode == MixMode::kSoftmaxScaled) mix->scale = params(params.size() - 1);
  }
}

double ProbeObjective::Evaluate(const Eigen::VectorXd &params,
                                Eigen::VectorXd *grad,
                                std::span<const std::size_t> examples) const {
  LinearModel<double> model;
  MixWeights<double> mix;
  Unpack(params, &model, &mix);

  // Resolve examples into rows (and groups for the listwise loss).
  std::vector<std::size_t> rows, groups, group_starts;
  const std::size_t n_ex = inputs_.n_examples(loss_);
  auto for_each_example = [&](auto &&fn) {
    if (examples.empty()) {
      for (std::size_t e = 0; e < n_ex; ++e) fn(e);
    } else {
      for (std::size_t e : examples) fn(e);
    }
  };
  if (loss_ == ProbeLoss::kListwiseCrossEntropy) {
    for_each_example([&](std::size_t g) {
      groups.push_back(g);
      group_starts.push_back(rows.size());
      for (std::size_t r = inputs_.group_offsets[g];
           r < inputs_.group_offsets[g + 1]; ++r) {
        rows.push_back(r);
      }
    });
    group_starts.push_back(rows.size());
  } else {
    for_each_example([&](std::size_t r) { rows.push_back(r); });
  }
  const double count = static_cast<double>(
      loss_ == ProbeLoss::kListwiseCrossEntropy ? groups.size() : rows.size());
  if (count == 0) throw std::invalid_argument("ProbeObjective: no examples");

  Eigen::VectorXd coeff;
  Eigen::MatrixXd mixed;
  Eigen::MatrixXd x;
  if (train_mix_) {
    coeff = mix.Coefficients();
    mixed = MixItems(inputs_, coeff);
    x = BuildFeatures(inputs_, mixed, rows);
  } else {
    x.resize(n_features_, rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      x.col(j) = frozen_features_.col(rows[j]);
    }
  }
  const Eigen::MatrixXd z = (model.weights * x).colwise() + model.bias;
  Eigen::MatrixXd dz;
  const double data =
      LossAndLogitGrad(loss_, inputs_, z, rows, groups, group_starts, &dz);
  const double value =
      data / count + 0.5 * l2_ * model.weights.squaredNorm();
  if (!grad) return value;

  dz /= count;
  grad->resize(n_params());
  const Eigen::Index nw = n_classes_ * n_features_;
  Eigen::MatrixXd dw = dz * x.transpose() + l2_ * model.weights;
  grad->head(nw) = dw.reshaped();
  grad->segment(nw, n_classes_) = dz.rowwise().sum();
  if (!train_mix_) return value;

  // Back through the featurizer to the mixed items, then to the mixing
  // coefficients and the raw weights.
  const Eigen::MatrixXd dx = model.weights.transpose() * dz;
  Eigen::MatrixXd dmixed = Eigen::MatrixXd::Zero(inputs_.dim, mixed.cols());
  const Eigen::Index d = inputs_.dim;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto &r = inputs_.rows[rows[j]];
    if (inputs_.kind == FeatureKind::kSingle) {
      dmixed.col(r.first) += dx.col(j);
      continue;
    }
    const auto a = mixed.col(r.first);
    const auto b = mixed.col(r.second);
    const Eigen::VectorXd sign = (a - b).array().sign().matrix();
    const auto g1 = dx.col(j).segment(0, d);
    const auto g2 = dx.col(j).segment(d, d);
    const auto g3 = dx.col(j).segment(2 * d, d);
    const auto g4 = dx.col(j).segment(3 * d, d);
    dmixed.col(r.first) +=
        g1 + g3.cwiseProduct(b) + g4.cwiseProduct(sign);
    dmixed.col(r.second) +=
        g2 + g3.cwiseProduct(a) - g4.cwiseProduct(sign);
  }
  Eigen::VectorXd dcoeff = Eigen::VectorXd::Zero(inputs_.n_layers);
  for (std::size_t k = 0; k < inputs_.n_items(); ++k) {
    dcoeff.noalias() += inputs_.Item(k).transpose() * dmixed.col(k);
  }
  const Eigen::Index mix_at = nw + n_classes_;
  if (mix.mode == MixMode::kUnnormalized) {
    grad->segment(mix_at, inputs_.n_layers) = dcoeff;
  } else {
    const Eigen::VectorXd p = coeff / mix.scale;
    const double pd = p.dot(dcoeff);
    grad->segment(mix_at, inputs_.n_layers) =
        mix.scale * (p.cwiseProduct(dcoeff).array() - p.array() * pd).matrix();
    (*grad)(grad->size() - 1) = pd;
  }
  return value;
}

double ProbeObjective::DataLoss(const Eigen::VectorXd &params) const {
  LinearModel<double> model;
  MixWeights<double> mix;
  Unpack(params, &model, &mix);
  return Evaluate(params, nullptr) - 0.5 * l2_ * model.weights.squaredNorm();
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  }
  if (epochs <= 0) throw std::invalid_argument("TrainConfig: epochs must be positive");
  if (batch_size < 0) {
    throw std::invalid_argument("TrainConfig: batch_size must be >= 0");
  }
  if (early_stop_patience <= 0) {
    throw std::invalid_argument("TrainConfig: early_stop_patience must be positive");
  }
  if (!(l2 >= 0.0)) throw std::invalid_argument("TrainConfig: l2 must be >= 0");
}

namespace {

constexpr int kMaxHalvings = 50;

struct StepOutcome {
  bool moved = false;
  bool all_nonfinite = true;
};

// One backtracking step on `objective` restricted to `examples`.
StepOutcome BacktrackingStep(const ProbeObjective &objective,
                             std::span<const std::size_t> examples,
                             double *step, Eigen::VectorXd *theta) {
  Eigen::VectorXd grad;
  const double f = objective.Evaluate(*theta, &grad, examples);
  if (!std::isfinite(f)) {
    throw DivergenceError(
        "probe loss is not finite; check the inputs or use a smaller "
        "learning rate");
  }
  StepOutcome out;
  if (grad.squaredNorm() == 0.0) {
    out.all_nonfinite = false;
    return out;
  }
  for (int t = 0; t < kMaxHalvings; ++t) {
    Eigen::VectorXd cand = *theta - *step * grad;
    const double fc = objective.Evaluate(cand, nullptr, examples);
    if (std::isfinite(fc)) out.all_nonfinite = false;
    if (std::isfinite(fc) && fc < f) {
      *theta = std::move(cand);
      out.moved = true;
      return out;
    }
    *step *= 0.5;
  }
  return out;
}

}  // namespace

TrainResult TrainLinear(const ProbeInputs &train, const ProbeInputs *dev,
                        ProbeLoss loss, Eigen::Index n_classes,
                        const TrainConfig &cfg,
                        std::optional<MixWeights<double>> mix,
                        std::optional<MixWeights<double>> fixed_mix) {
  cfg.Validate();
  const bool train_mix = mix.has_value();
  MixWeights<double> start;
  if (mix) {
    start = *mix;
  } else if (fixed_mix) {
    start = *fixed_mix;
  } else if (train.n_layers == 1) {
    start = MixWeights<double>::SingleLayer(1, 0);
  } else {
    throw std::invalid_argument(
        "TrainLinear: multi-layer inputs need mixing weights");
  }
  const ProbeObjective objective(train, loss, n_classes, cfg.l2, start,
                                 train_mix);
  std::optional<ProbeObjective> dev_objective;
  if (dev) {
    if (dev->dim != train.dim || dev->n_layers != train.n_layers ||
        dev->kind != train.kind) {
      throw std::invalid_argument("TrainLinear: dev inputs differ in shape");
    }
    dev_objective.emplace(*dev, loss, n_classes, 0.0, start, train_mix);
  }
  const Eigen::Index outputs = objective.n_classes();
  Eigen::VectorXd theta = objective.Pack(
      LinearModel<double>::Zero(outputs, train.feature_dim()), start);

  auto monitor = [&](const Eigen::VectorXd &p) {
    return dev_objective ? dev_objective->DataLoss(p)
                         : objective.Evaluate(p, nullptr);
  };

  TrainResult result;
  const double initial = objective.Evaluate(theta, nullptr);
  if (!std::isfinite(initial)) {
    throw DivergenceError(
        "initial probe loss is not finite; check the inputs or use a smaller "
        "learning rate");
  }
  result.train_loss.push_back(initial);
  Eigen::VectorXd best = theta;
  double best_monitor = monitor(theta);
  int since_best = 0;
  double step = cfg.learning_rate;
  const double max_step = cfg.learning_rate * 1024.0;

  const std::size_t n_ex = train.n_examples(loss);
  std::vector<std::size_t> order(n_ex);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  const std::size_t batch =
      cfg.batch_size > 0 ? static_cast<std::size_t>(cfg.batch_size) : n_ex;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    bool moved_any = false;
    if (batch >= n_ex) {
      const StepOutcome s = BacktrackingStep(objective, {}, &step, &theta);
      if (s.all_nonfinite && !s.moved) {
        throw DivergenceError(
            "probe loss diverged (NaN/Inf) at every trial step; use a "
            "smaller learning rate");
      }
      moved_any = s.moved;
      if (s.moved) step = std::min(step * 2.0, max_step);
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t b = 0; b < n_ex; b += batch) {
        const std::size_t e = std::min(n_ex, b + batch);
        std::span<const std::size_t> ex(order.data() + b, e - b);
        double local = cfg.learning_rate;
        const StepOutcome s = BacktrackingStep(objective, ex, &local, &theta);
        moved_any = moved_any || s.moved;
      }
    }
    result.epochs_run = epoch;
    if (!moved_any) break;  // converged: no descent step found
    result.train_loss.push_back(objective.Evaluate(theta, nullptr));
    const double m = monitor(theta);
    if (m < best_monitor) {
      best_monitor = m;
      best = theta;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.early_stop_patience) {
      break;
    }
  }
  objective.Unpack(best, &result.model, &result.mix);
  return result;
}

TrainResult TrainLinear(const Eigen::MatrixXd &features,
                        const std::vector<int> &labels, ProbeLoss loss,
                        Eigen::Index n_classes, const TrainConfig &cfg) {
  ProbeInputs inputs = ProbeInputs::FromFeatures(features);
  inputs.labels = labels;
  return TrainLinear(inputs, nullptr, loss, n_classes, cfg, std::nullopt);
}

Eigen::MatrixXd PredictRows(const ProbeInputs &inputs,
                            const LinearModel<double> &model,
                            const MixWeights<double> &mix, ProbeLoss loss) {
  std::vector<std::size_t> all(inputs.rows.size());
  std::iota(all.begin(), all.end(), 0);
  const Eigen::MatrixXd x =
      BuildFeatures(inputs, MixItems(inputs, mix.Coefficients()), all);
  if (loss != ProbeLoss::kListwiseCrossEntropy) {
    return PredictProba(model, x, loss);
  }
  const Eigen::MatrixXd z = model.Logits(x);
  Eigen::MatrixXd p(1, z.cols());
  for (std::size_t g = 0; g + 1 < inputs.group_offsets.size(); ++g) {
    const auto begin = static_cast<Eigen::Index>(inputs.group_offsets[g]);
    const auto n = static_cast<Eigen::Index>(inputs.group_offsets[g + 1]) - begin;
    const double m = z.row(0).segment(begin, n).maxCoeff();
    Eigen::RowVectorXd e = (z.row(0).segment(begin, n).array() - m).exp().matrix();
    p.row(0).segment(begin, n) = e / e.sum();
  }
  return p;
}

// ---------------------------------------------------------------------------
// Thresholds

namespace {

// Incrementally maintained multilabel objective.
class ThresholdState {
 public:
  ThresholdState(const std::vector<std::set<int>> &gold, ThresholdObjective obj)
      : gold_(gold), objective_(obj), pred_(gold.size(), 0), hit_(gold.size(), 0) {
    for (const auto &g : gold) {
      if (!g.empty()) ++recall_count_;
    }
    exact_ = 0;
    for (const auto &g : gold) {
      if (g.empty()) ++exact_;
    }
  }

  void Toggle(std::size_t i, int type, int delta) {
    Remove(i);
    pred_[i] += delta;
    if (gold_[i].count(type)) hit_[i] += delta;
    Add(i);
  }

  double Value() const {
    if (objective_ == ThresholdObjective::kAccuracy) {
      return gold_.empty() ? 0.0 : static_cast<double>(exact_) / gold_.size();
    }
    const double p = precision_count_ > 0 ? precision_sum_ / precision_count_ : 0.0;
    const double r = recall_count_ > 0 ? recall_sum_ / recall_count_ : 0.0;
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }

 private:
  void Remove(std::size_t i) {
    if (pred_[i] > 0) {
      precision_sum_ -= static_cast<double>(hit_[i]) / pred_[i];
      --precision_count_;
    }
    if (!gold_[i].empty()) {
      recall_sum_ -= static_cast<double>(hit_[i]) / gold_[i].size();
    }
    if (Exact(i)) --exact_;
  }
  void Add(std::size_t i) {
    if (pred_[i] > 0) {
      precision_sum_ += static_cast<double>(hit_[i]) / pred_[i];
      ++precision_count_;
    }
    if (!gold_[i].empty()) {
      recall_sum_ += static_cast<double>(hit_[i]) / gold_[i].size();
    }
    if (Exact(i)) ++exact_;
  }
  bool Exact(std::size_t i) const {
    return pred_[i] == hit_[i] &&
           static_cast<std::size_t>(hit_[i]) == gold_[i].size();
  }

  const std::vector<std::set<int>> &gold_;
  ThresholdObjective objective_;
  std::vector<int> pred_;
  std::vector<int> hit_;
  double precision_sum_ = 0.0;
  double recall_sum_ = 0.0;
  std::size_t precision_count_ = 0;
  std::size_t recall_count_ = 0;
  std::size_t exact_ = 0;
};

}  // namespace

std::vector<double> TuneThresholds(const Eigen::MatrixXd &scores,
                                   const std::vector<std::set<int>> &gold,
                                   ThresholdObjective objective) {
  const auto n = static_cast<std::size_t>(scores.rows());
  const auto types = scores.cols();
  if (gold.size() != n) {
    throw std::invalid_argument("TuneThresholds: gold/score count mismatch");
  }
  std::vector<bool> has_positive(types, false);
  for (const auto &g : gold) {
    for (int t : g) {
      if (t >= 0 && t < types) has_positive[t] = true;
    }
  }
  std::vector<double> thresholds(types, 0.5);
  for (Eigen::Index t = 0; t < types; ++t) {
    if (!has_positive[t]) {
      const double max_score = n > 0 ? scores.col(t).maxCoeff() : 0.0;
      thresholds[t] = std::nextafter(max_score, 2.0);
    }
  }

  ThresholdState state(gold, objective);
  for (Eigen::Index t = 0; t < types; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (scores(i, t) >= thresholds[t]) state.Toggle(i, static_cast<int>(t), 1);
    }
  }

  std::vector<std::size_t> order(n);
  for (Eigen::Index t = 0; t < types; ++t) {
    if (!has_positive[t]) continue;
    const int type = static_cast<int>(t);
    const double current = thresholds[t];
    for (std::size_t i = 0; i < n; ++i) {
      if (scores(i, t) >= current) state.Toggle(i, type, -1);
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores(a, t) > scores(b, t);
    });
    // Sweep thresholds from "never" down through each unique score.
    double best_value = state.Value();
    double best_threshold = std::nextafter(scores.col(t).maxCoeff(), 2.0);
    bool current_seen = current > scores.col(t).maxCoeff();
    double current_value = current_seen ? best_value : -1.0;
    std::size_t k = 0;
    while (k < n) {
      const double s = scores(order[k], t);
      while (k < n && scores(order[k], t) == s) {
        state.Toggle(order[k], type, 1);
        ++k;
      }
      const double v = state.Value();
      const double next = k < n ? scores(order[k], t) : -1.0;
      if (!current_seen && current <= s && current > next) {
        current_seen = true;
        current_value = v;
      }
      if (v > best_value) {
        best_value = v;
        best_threshold = s;
      }
    }
    const double chosen =
        current_value >= best_value ? current : best_threshold;
    thresholds[t] = chosen;
    for (std::size_t i = 0; i < n; ++i) {
      if (scores(i, t) < chosen) state.Toggle(i, type, -1);
    }
  }
  return thresholds;
}

std::vector<std::set<int>> ApplyThresholds(const Eigen::MatrixXd &scores,
                                           std::span<const double> thresholds) {
  if (static_cast<Eigen::Index>(thresholds.size()) != scores.cols()) {
    throw std::invalid_argument("ApplyThresholds: threshold count mismatch");
  }
  std::vector<std::set<int>> out(scores.rows());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index t = 0; t < scores.cols(); ++t) {
      if (scores(i, t) >= thresholds[t]) out[i].insert(static_cast<int>(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {
constexpr std::string_view kModelPrefix = "model:";
}

EmbeddingSet ModelToEmbeddingSet(const LinearModel<float> &model,
                                 const MixWeights<float> &mix) {
  const auto classes = static_cast<std::size_t>(model.n_classes());
  const auto features = static_cast<std::size_t>(model.n_features());
  const std::size_t dim = features + 1;
  if (static_cast<std::size_t>(mix.n_layers()) + 1 > dim) {
    throw std::invalid_argument(
        "checkpoint: more mixing weights than feature slots");
  }
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < classes; ++c) {
    ids.push_back("model:class:" + std::to_string(c));
  }
  ids.push_back(std::string("model:mix:") + MixModeName(mix.mode) + ":" +
                std::to_string(mix.n_layers()));
  EmbeddingSet set(std::move(ids), 1, dim);
  for (std::size_t c = 0; c < classes; ++c) {
    auto v = set.MutableVector(c, 0);
    v.head(features) = model.weights.row(c).transpose();
    v(features) = model.bias(c);
  }
  auto m = set.MutableVector(classes, 0);
  m(0) = mix.scale;
  m.segment(1, mix.n_layers()) = mix.raw;
  return set;
}

bool IsModelCheckpoint(const EmbeddingSet &set) {
  return !set.ids().empty() &&
         std::all_of(set.ids().begin(), set.ids().end(), [](const auto &id) {
           return id.rfind(kModelPrefix, 0) == 0;
         });
}

void ModelFromEmbeddingSet(const EmbeddingSet &set, LinearModel<float> *model,
                           MixWeights<float> *mix) {
  if (!IsModelCheckpoint(set) || set.n_layers() != 1 || set.dim() < 1) {
    throw FormatError("EEV1 file is not a model checkpoint");
  }
  const std::size_t classes = set.n_instances() - 1;
  const std::size_t features = set.dim() - 1;
  const std::string &mix_id = set.ids().back();
  const std::string head = "model:mix:";
  if (mix_id.rfind(head, 0) != 0) {
    throw FormatError("checkpoint: missing mixing record");
  }
  const std::string rest = mix_id.substr(head.size());
  const std::size_t colon = rest.rfind(':');
  if (colon == std::string::npos) throw FormatError("checkpoint: bad mixing id");
  MixWeights<float> w;
  try {
    w.mode = ParseMixMode(rest.substr(0, colon));
  } catch (const std::invalid_argument &e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  const std::size_t layers = std::stoul(rest.substr(colon + 1));
  if (layers + 1 > set.dim()) throw FormatError("checkpoint: bad layer count");
  model->weights.resize(classes, features);
  model->bias.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const auto v = set.Vector(c, 0);
    model->weights.row(c) = v.head(features).transpose();
    model->bias(c) = v(features);
  }
  const auto m = set.Vector(classes, 0);
  w.scale = m(0);
  w.raw = m.segment(1, layers);
  *mix = w;
}

}  // namespace enteval
