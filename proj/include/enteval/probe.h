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

// Linear probes over frozen representations.
//
// A probe sees each instance as one or two multi-layer representations.
// Layers are combined with scalar mixing weights (optionally trained jointly
// with the classifier), optionally passed through the pair featurizer, and
// scored by a single affine map. Nothing upstream of the mixing weights is
// trainable.

#ifndef ENTEVAL_PROBE_H_
#define ENTEVAL_PROBE_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "enteval/core.h"
#include "enteval/embed_io.h"

namespace enteval {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MixMode { kSoftmaxScaled, kUnnormalized };

const char *MixModeName(MixMode mode);
MixMode ParseMixMode(const std::string &name);

template <typename Scalar>
struct MixWeights {
  MixMode mode = MixMode::kSoftmaxScaled;
  VectorX<Scalar> raw;
  Scalar scale = Scalar(1);

  // Uniform softmax weights with unit scale.
  static MixWeights Uniform(Eigen::Index n_layers) {
    return {MixMode::kSoftmaxScaled, VectorX<Scalar>::Zero(n_layers),
            Scalar(1)};
  }
  // Selects exactly one layer.
  static MixWeights SingleLayer(Eigen::Index n_layers, Eigen::Index layer) {
    MixWeights w{MixMode::kUnnormalized, VectorX<Scalar>::Zero(n_layers),
                 Scalar(1)};
    w.raw(layer) = Scalar(1);
    return w;
  }

  Eigen::Index n_layers() const { return raw.size(); }

  // Effective per-layer coefficients.
  VectorX<Scalar> Coefficients() const {
    if (raw.size() < 1) throw std::invalid_argument("MixWeights: no layers");
    if (mode == MixMode::kUnnormalized) return raw;
    const Scalar m = raw.maxCoeff();
    VectorX<Scalar> e = (raw.array() - m).exp().matrix();
    return scale * e / e.sum();
  }

  template <typename Other>
  MixWeights<Other> Cast() const {
    return {mode, raw.template cast<Other>(), static_cast<Other>(scale)};
  }
};

// Mixes a dim x n_layers block into a single dim-vector.
template <typename Derived, typename Scalar>
VectorX<Scalar> MixLayers(const Eigen::MatrixBase<Derived> &layers,
                          const MixWeights<Scalar> &w) {
  if (layers.cols() != w.n_layers()) {
    throw std::invalid_argument(
        "MixLayers: " + std::to_string(layers.cols()) + " layers but " +
        std::to_string(w.n_layers()) + " mixing weights");
  }
  return layers.template cast<Scalar>() * w.Coefficients();
}

// Mixes every instance of a set; returns dim x n_instances.
MatrixX<float> MixLayers(const EmbeddingSet &set, const MixWeights<float> &w);

template <typename Scalar>
struct LinearModel {
  MatrixX<Scalar> weights;  // classes x features
  VectorX<Scalar> bias;     // classes

  static LinearModel Zero(Eigen::Index classes, Eigen::Index features) {
    return {MatrixX<Scalar>::Zero(classes, features),
            VectorX<Scalar>::Zero(classes)};
  }

  Eigen::Index n_classes() const { return weights.rows(); }
  Eigen::Index n_features() const { return weights.cols(); }

  // features: n_features x N. Returns n_classes x N logits.
  template <typename Derived>
  MatrixX<Scalar> Logits(const Eigen::MatrixBase<Derived> &features) const {
    if (features.rows() != weights.cols()) {
      throw std::invalid_argument(
          "LinearModel: feature dim " + std::to_string(features.rows()) +
          " does not match model dim " + std::to_string(weights.cols()));
    }
    return (weights * features.template cast<Scalar>()).colwise() + bias;
  }

  template <typename Other>
  LinearModel<Other> Cast() const {
    return {weights.template cast<Other>(), bias.template cast<Other>()};
  }
};

enum class ProbeLoss {
  kBinaryLog,            // one sigmoid output, label in {0, 1}
  kCrossEntropy,         // softmax over classes, label = class index
  kMultilabelBinaryLog,  // one sigmoid per class, label = set of classes
  kListwiseCrossEntropy  // one score per row, softmax within each group
};

const char *ProbeLossName(ProbeLoss loss);

// Sigmoid per class for the binary losses, softmax over classes for
// kCrossEntropy, softmax over all columns for kListwiseCrossEntropy.
template <typename Scalar, typename Derived>
MatrixX<Scalar> PredictProba(const LinearModel<Scalar> &model,
                             const Eigen::MatrixBase<Derived> &features,
                             ProbeLoss loss) {
  MatrixX<Scalar> z = model.Logits(features);
  switch (loss) {
    case ProbeLoss::kBinaryLog:
    case ProbeLoss::kMultilabelBinaryLog:
      return (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
    case ProbeLoss::kCrossEntropy: {
      MatrixX<Scalar> p(z.rows(), z.cols());
      for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const Scalar m = z.col(j).maxCoeff();
        p.col(j) = (z.col(j).array() - m).exp().matrix();
        p.col(j) /= p.col(j).sum();
      }
      return p;
    }
    case ProbeLoss::kListwiseCrossEntropy: {
      const Scalar m = z.maxCoeff();
      MatrixX<Scalar> p = (z.array() - m).exp().matrix();
      return p / p.sum();
    }
  }
  throw std::logic_error("unreachable");
}

enum class FeatureKind { kSingle, kPair };

// Layered inputs for a probe. Each item is a dim x n_layers block; a
// feature row is built from one item (kSingle) or two (kPair, via
// MakePairFeature).
struct ProbeInputs {
  struct Row {
    std::size_t first = 0;
    std::size_t second = 0;  // kPair only
  };

  Eigen::Index dim = 0;
  Eigen::Index n_layers = 0;
  std::vector<double> storage;  // items back to back, column-major blocks
  FeatureKind kind = FeatureKind::kSingle;
  std::vector<Row> rows;

  // kBinaryLog / kCrossEntropy: one label per row.
  // kListwiseCrossEntropy: one label per group (index within the group).
  std::vector<int> labels;
  // kMultilabelBinaryLog: one set per row.
  std::vector<std::set<int>> label_sets;
  // kListwiseCrossEntropy: group g spans rows [group_offsets[g],
  // group_offsets[g + 1]).
  std::vector<std::size_t> group_offsets;

  std::size_t n_items() const {
    const auto block = static_cast<std::size_t>(dim * n_layers);
    return block > 0 ? storage.size() / block : 0;
  }
  Eigen::Map<const Eigen::MatrixXd> Item(std::size_t k) const {
    return Eigen::Map<const Eigen::MatrixXd>(
        storage.data() + k * static_cast<std::size_t>(dim * n_layers), dim,
        n_layers);
  }
  Eigen::Index feature_dim() const {
    return kind == FeatureKind::kPair ? 4 * dim : dim;
  }
  // Number of loss terms: groups for the listwise loss, rows otherwise.
  std::size_t n_examples(ProbeLoss loss) const;

  // Appends an item; returns its index.
  template <typename Derived>
  std::size_t AddItem(const Eigen::MatrixBase<Derived> &item_layers) {
    if (storage.empty() && n_layers == 0) {
      dim = item_layers.rows();
      n_layers = item_layers.cols();
    } else if (item_layers.rows() != dim || item_layers.cols() != n_layers) {
      throw std::invalid_argument("ProbeInputs: inconsistent item shape");
    }
    const std::size_t k = n_items();
    const Eigen::MatrixXd block = item_layers.template cast<double>();
    storage.insert(storage.end(), block.data(), block.data() + block.size());
    return k;
  }

  // One single-layer item and one row per column of `features`.
  static ProbeInputs FromFeatures(const Eigen::MatrixXd &features);

  // Throws std::invalid_argument when labels do not fit `loss`.
  void Validate(ProbeLoss loss, Eigen::Index n_classes) const;
};

// Mixed item representations (dim x n_items).
Eigen::MatrixXd MixItems(const ProbeInputs &inputs,
                         const Eigen::VectorXd &coefficients);

// Builds feature rows (feature_dim x rows.size()) from mixed items.
Eigen::MatrixXd BuildFeatures(const ProbeInputs &inputs,
                              const Eigen::MatrixXd &mixed,
                              std::span<const std::size_t> rows);

// Regularized mean loss of a linear probe with optional joint mixing
// weights, with analytic gradients. Parameters are packed as
// [weights (column-major), bias, mixing raw weights, mixing scale], where the
// mixing entries are present only when mixing is trained and the scale only
// in softmax-scaled mode.
class ProbeObjective {
 public:
  ProbeObjective(const ProbeInputs &inputs, ProbeLoss loss,
                 Eigen::Index n_classes, double l2,
                 const MixWeights<double> &mix, bool train_mix);

  Eigen::Index n_params() const;
  Eigen::Index n_classes() const { return n_classes_; }

  Eigen::VectorXd Pack(const LinearModel<double> &model,
                       const MixWeights<double> &mix) const;
  void Unpack(const Eigen::VectorXd &params, LinearModel<double> *model,
              MixWeights<double> *mix) const;

  // Mean loss over `examples` (all when empty) plus 0.5 * l2 * |W|^2.
  double Evaluate(const Eigen::VectorXd &params, Eigen::VectorXd *grad,
                  std::span<const std::size_t> examples = {}) const;

  // Unregularized mean loss.
  double DataLoss(const Eigen::VectorXd &params) const;

 private:
  const ProbeInputs &inputs_;
  ProbeLoss loss_;
  Eigen::Index n_classes_;
  double l2_;
  MixWeights<double> fixed_mix_;
  bool train_mix_;
  Eigen::Index n_features_;
  // Cached features when mixing is frozen.
  Eigen::MatrixXd frozen_features_;
};

struct TrainConfig {
  double learning_rate = 1.0;
  int epochs = 300;
  int batch_size = 0;  // 0: full batch
  std::uint64_t seed = 42;
  int early_stop_patience = 25;
  double l2 = 1e-4;

  void Validate() const;
};

struct TrainResult {
  LinearModel<double> model;
  MixWeights<double> mix;
  std::vector<double> train_loss;  // regularized objective per accepted step
  int epochs_run = 0;
  int best_epoch = 0;
};

// Gradient descent with backtracking step halving and early stopping on
// the dev loss (the training objective when `dev` is null). When `mix` is
// given its weights are trained jointly; otherwise inputs must be
// single-layer or `fixed_mix` selects the combination.
TrainResult TrainLinear(const ProbeInputs &train, const ProbeInputs *dev,
                        ProbeLoss loss, Eigen::Index n_classes,
                        const TrainConfig &cfg,
                        std::optional<MixWeights<double>> mix,
                        std::optional<MixWeights<double>> fixed_mix = {});

// Convenience overload for precomputed features (features x N).
TrainResult TrainLinear(const Eigen::MatrixXd &features,
                        const std::vector<int> &labels, ProbeLoss loss,
                        Eigen::Index n_classes, const TrainConfig &cfg);

// Probabilities for every row (n_classes x rows; 1 x rows for listwise).
Eigen::MatrixXd PredictRows(const ProbeInputs &inputs,
                            const LinearModel<double> &model,
                            const MixWeights<double> &mix, ProbeLoss loss);

enum class ThresholdObjective { kF1, kAccuracy };

// Per-type decision thresholds; a type is predicted when its score is at
// least the threshold. Types with no positive in `gold` get a threshold just
// above their maximum score. scores: n_instances x n_types in [0, 1].
std::vector<double> TuneThresholds(
    const Eigen::MatrixXd &scores, const std::vector<std::set<int>> &gold,
    ThresholdObjective objective = ThresholdObjective::kF1);

std::vector<std::set<int>> ApplyThresholds(const Eigen::MatrixXd &scores,
                                           std::span<const double> thresholds);

// Model checkpoints travel in the EEV1 container: one instance per class
// ("model:class:<k>", payload = weights then bias) and one mixing instance
// ("model:mix:<mode>:<n_layers>", payload = scale then raw weights, zero
// padded). The "model:" id prefix marks a checkpoint.
EmbeddingSet ModelToEmbeddingSet(const LinearModel<float> &model,
                                 const MixWeights<float> &mix);
void ModelFromEmbeddingSet(const EmbeddingSet &set, LinearModel<float> *model,
                           MixWeights<float> *mix);
bool IsModelCheckpoint(const EmbeddingSet &set);

}  // namespace enteval

#endif  // ENTEVAL_PROBE_H_
