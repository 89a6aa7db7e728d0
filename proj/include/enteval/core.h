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

// Domain types shared by every module, the pair featurizer, and the task
// metrics (Spearman, multilabel F1, accuracy).

#ifndef ENTEVAL_CORE_H_
#define ENTEVAL_CORE_H_

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace enteval {

// Number of fine-grained types in the ultra-fine typing vocabulary.
inline constexpr int kNumEntityTypes = 10331;

// Maximum number of word tokens kept from an entity description.
inline constexpr std::size_t kMaxDescriptionTokens = 100;

// Malformed input file or stream.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a dataset contract (missing gold, bad ids).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Correlation with fewer than two points or a constant rank vector.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inclusive token span [start, end].
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start + 1; }
  bool operator==(const Span &) const = default;
};

// A tokenized sentence with one marked entity mention.
struct MentionContext {
  std::string instance_id;
  std::vector<std::string> tokens;
  Span span;

  // Throws std::invalid_argument when the span is out of range, the token
  // sequence is empty, or a token carries upper-case ASCII.
  void Validate() const;

  std::span<const std::string> MentionTokens() const {
    return std::span<const std::string>(tokens).subspan(span.start,
                                                        span.size());
  }
};

struct EntityDescription {
  std::string entity_id;
  std::string title;
  std::vector<std::string> tokens;

  void Validate() const;
};

enum class PairGroup { kSame, kNext };

const char *PairGroupName(PairGroup group);
PairGroup ParsePairGroup(const std::string &name);

struct PairInstance {
  std::string id;
  MentionContext left;
  MentionContext right;
  int label = 0;
  std::optional<PairGroup> group;  // CAP only
};

struct TypedInstance {
  MentionContext mention;
  std::set<int> gold_types;

  void Validate() const;
};

struct SimilarityPair {
  std::string id;
  std::string subset;
  EntityDescription entity1;
  EntityDescription entity2;
  double gold_score = 0.0;
};

// Lower-cases ASCII letters; multi-byte UTF-8 sequences pass through.
std::string Lowercase(std::string text);

// Builds [x1, x2, x1 * x2, |x1 - x2|]. Throws std::invalid_argument on a
// dimension mismatch.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> MakePairFeature(
    const Eigen::MatrixBase<DerivedA> &x1,
    const Eigen::MatrixBase<DerivedB> &x2) {
  using Scalar = typename DerivedA::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedB::Scalar>,
                "pair feature inputs must share a scalar type");
  if (x1.size() != x2.size()) {
    throw std::invalid_argument("MakePairFeature: dimension mismatch (" +
                                std::to_string(x1.size()) + " vs " +
                                std::to_string(x2.size()) + ")");
  }
  const Eigen::Index d = x1.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(4 * d);
  out.segment(0, d) = x1.reshaped();
  out.segment(d, d) = x2.reshaped();
  out.segment(2 * d, d) = x1.reshaped().cwiseProduct(x2.reshaped());
  out.segment(3 * d, d) = (x1.reshaped() - x2.reshaped()).cwiseAbs();
  return out;
}

// Fractional (average) ranks, 1-based.
std::vector<double> FractionalRanks(std::span<const double> values);

// Spearman's rho as the Pearson correlation of fractional ranks.
double Spearman(std::span<const double> pred, std::span<const double> gold);

// Pearson correlation; throws UndefinedCorrelation on zero variance.
double Pearson(std::span<const double> a, std::span<const double> b);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Macro-averaged over instances: precision over instances with a nonempty
// prediction, recall over instances with a nonempty gold set, F1 the
// harmonic mean of the two averages.
PrecisionRecallF1 MultilabelF1(const std::vector<std::set<int>> &predicted,
                               const std::vector<std::set<int>> &gold);

// Micro-averaged counterpart (pooled true positives).
PrecisionRecallF1 MultilabelMicroF1(const std::vector<std::set<int>> &predicted,
                                    const std::vector<std::set<int>> &gold);

template <typename Label>
double Accuracy(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size()) {
    throw std::invalid_argument("Accuracy: length mismatch");
  }
  if (predicted.empty()) throw std::invalid_argument("Accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == gold[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

template <typename Label>
double Accuracy(const std::vector<Label> &predicted,
                const std::vector<Label> &gold) {
  return Accuracy(std::span<const Label>(predicted),
                  std::span<const Label>(gold));
}

// Cosine similarity; returns std::nullopt when either vector has zero norm.
template <typename DerivedA, typename DerivedB>
std::optional<double> Cosine(const Eigen::MatrixBase<DerivedA> &a,
                             const Eigen::MatrixBase<DerivedB> &b) {
  const double na = static_cast<double>(a.norm());
  const double nb = static_cast<double>(b.norm());
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return static_cast<double>(a.dot(b)) / (na * nb);
}

}  // namespace enteval

#endif  // ENTEVAL_CORE_H_
