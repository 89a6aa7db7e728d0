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

// Desk-scale hyperlink-based training objective.
//
// A small bidirectional recurrent language model (one tanh RNN per
// direction, each followed by a linear projection and its own output
// softmax) is trained with
//
//   l_lang(context) + l_lang(description) + l_ctx + l_desc
//
// where l_lang is the forward + backward next-token loss, l_desc
// reconstructs description tokens as a bag of words from the span-averaged
// contextual states of "[BOC] context", and l_ctx reconstructs context
// tokens from the averaged states of "[BOD] description". Each bag-of-words
// term goes through its own linear decoder. All gradients are analytic
// (hand-written backpropagation through time) and can be checked against
// central finite differences with GradCheck().

#ifndef ENTEVAL_TOYTRAIN_H_
#define ENTEVAL_TOYTRAIN_H_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "enteval/core.h"

namespace enteval::toy {

inline constexpr const char *kUnk = "<unk>";
inline constexpr const char *kBod = "[BOD]";
inline constexpr const char *kBoc = "[BOC]";
inline constexpr const char *kSentenceStart = "<s>";
inline constexpr const char *kSentenceEnd = "</s>";

class Vocab {
 public:
  // Specials first (<unk>, [BOD], [BOC], <s>, </s>), then corpus tokens by
  // descending frequency, ties broken lexicographically.
  static Vocab Build(const std::vector<std::vector<std::string>> &corpus,
                     std::size_t max_size = 0);
  // A vocabulary of the specials plus `extra` synthetic tokens "w0", "w1",..
  static Vocab Synthetic(int extra);

  int Id(const std::string &token) const;  // <unk> when absent
  const std::string &Token(int id) const { return tokens_.at(id); }
  std::vector<int> Encode(std::span<const std::string> tokens) const;
  int size() const { return static_cast<int>(tokens_.size()); }

  int unk() const { return 0; }
  int bod() const { return 1; }
  int boc() const { return 2; }
  int sentence_start() const { return 3; }
  int sentence_end() const { return 4; }

 private:
  void Add(const std::string &token);
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// One direction: h_t = tanh(w_in e(u_t) + w_rec h_{t-1} + b), z_t = proj h_t,
// p(next | prefix) = softmax(out z_t + out_bias).
struct RnnDirection {
  Eigen::MatrixXd w_in;      // hidden x embed
  Eigen::MatrixXd w_rec;     // hidden x hidden
  Eigen::VectorXd b;         // hidden
  Eigen::MatrixXd proj;      // projected x hidden
  Eigen::MatrixXd out;       // vocab x projected
  Eigen::VectorXd out_bias;  // vocab
};

struct ToyBiLM {
  Eigen::MatrixXd embed;  // embed x vocab
  RnnDirection fwd;
  RnnDirection bwd;
};

// Linear map from a conditioning vector to vocabulary logits.
struct BowDecoder {
  Eigen::MatrixXd weights;  // vocab x (2 * projected)
  Eigen::VectorXd bias;     // vocab
};

// The full parameter set. Gradients use the same type.
struct ToyModel {
  ToyBiLM lm;
  BowDecoder ctx_decoder;
  BowDecoder desc_decoder;

  int vocab_size() const { return static_cast<int>(lm.embed.cols()); }
  int projected() const { return static_cast<int>(lm.fwd.proj.rows()); }
  // Width of a contextual representation (forward and backward states).
  int context_dim() const { return 2 * projected(); }

  ToyModel ZerosLike() const;
  Eigen::Index n_params() const;
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd &flat);
  void AddScaled(const ToyModel &other, double scale);
  bool AllFinite() const;
};

struct ModelDims {
  int vocab = 12;
  int embed = 4;
  int hidden = 4;
  int projected = 3;
};

// Uniform(-init_scale, init_scale) weights, zero biases.
ToyModel InitModel(const ModelDims &dims, std::uint64_t seed,
                   double init_scale = 0.1);

enum class SoftmaxMode { kFull, kSampled };

struct LossOptions {
  SoftmaxMode softmax = SoftmaxMode::kFull;
  int negatives = 1024;     // K, sampled mode only
  int positive_cap = 50;    // P, bag-of-words positives per reconstruction
  bool pad_boundaries = false;  // wrap l_lang sequences in <s> ... </s>
};

// A HyperlinkPair encoded to vocabulary ids.
struct EncodedPair {
  std::vector<int> context;
  Span span;
  std::vector<int> description;
};

EncodedPair EncodePair(const Vocab &vocab, const MentionContext &context,
                       const EntityDescription &description);

// `grad` (when non-null) is accumulated into, not overwritten. `rng` drives
// positive subsampling and negative sampling; it may be null when neither
// happens.

// -sum_t [log p_fwd(u_{t+1} | u_1..u_t) + log p_bwd(u_{t-1} | u_t..u_T)],
// omitting the terms that would fall off either end.
double LangLoss(const ToyModel &model, std::span<const int> tokens,
                const LossOptions &opts, std::mt19937_64 *rng,
                ToyModel *grad = nullptr);

// Contextual representation: mean over positions [first, last] of the
// concatenated forward and backward projected states of `tokens`.
Eigen::VectorXd ContextualSpan(const ToyModel &model,
                               std::span<const int> tokens, std::size_t first,
                               std::size_t last);

// Bag-of-words reconstruction of description tokens from the mention span
// of "[BOC] context".
double DescLoss(const ToyModel &model, int boc_id, const EncodedPair &pair,
                const LossOptions &opts, std::mt19937_64 *rng,
                ToyModel *grad = nullptr);

// Bag-of-words reconstruction of context tokens from all description
// positions of "[BOD] description".
double CtxLoss(const ToyModel &model, int bod_id, const EncodedPair &pair,
               const LossOptions &opts, std::mt19937_64 *rng,
               ToyModel *grad = nullptr);

// CtxLoss restricted to the mention-span tokens.
double EtnLoss(const ToyModel &model, int bod_id, const EncodedPair &pair,
               const LossOptions &opts, std::mt19937_64 *rng,
               ToyModel *grad = nullptr);

enum class Variant { kFull, kNoCtx, kEtn };

const char *VariantName(Variant v);
Variant ParseVariant(const std::string &name);

struct LossBreakdown {
  double lang_context = 0.0;
  double lang_description = 0.0;
  double reconstruct_context = 0.0;  // l_ctx, or l_etn for Variant::kEtn
  double reconstruct_description = 0.0;
  double total = 0.0;
};

struct SpecialIds {
  int bod = 1;
  int boc = 2;
};

LossBreakdown TotalLoss(const ToyModel &model, const SpecialIds &ids,
                        const EncodedPair &pair, Variant variant,
                        const LossOptions &opts, std::mt19937_64 *rng,
                        ToyModel *grad = nullptr);

// Max over all parameters of |analytic - numeric| / max(|analytic|,
// |numeric|, floor) with central differences of width `epsilon`. Full
// softmax; positive subsampling (if the cap binds) is frozen by reseeding
// the sampler identically for every evaluation.
double GradCheck(const ToyModel &model, const SpecialIds &ids,
                 const EncodedPair &pair, Variant variant, double epsilon,
                 const LossOptions &opts = {}, double floor = 1e-6);

struct TrainOptions {
  int steps = 200;
  double learning_rate = 0.02;
  Variant variant = Variant::kFull;
  LossOptions loss;
  std::uint64_t seed = 42;
};

struct CurvePoint {
  int step = 0;
  LossBreakdown mean;  // averaged over pairs
};

// Full-batch Adam over all pairs. Returns the loss before each step plus
// the final loss (steps + 1 points).
std::vector<CurvePoint> Train(ToyModel *model, const SpecialIds &ids,
                              const std::vector<EncodedPair> &pairs,
                              const TrainOptions &opts);

// Mean loss over `pairs` without updating anything.
LossBreakdown MeanLoss(const ToyModel &model, const SpecialIds &ids,
                       const std::vector<EncodedPair> &pairs, Variant variant,
                       const LossOptions &opts, std::uint64_t seed,
                       ToyModel *grad = nullptr);

// TSV: step, variant, total, lang_context, lang_description,
// reconstruct_context, reconstruct_description.
void WriteCurve(const std::vector<CurvePoint> &curve, Variant variant,
                std::ostream &out);

}  // namespace enteval::toy

#endif  // ENTEVAL_TOYTRAIN_H_
