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

#include "enteval/toytrain.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace enteval::toy {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

template <typename D, typename F>
void ForEachDirectionBlock(D &d, F &f) {
  f(d.w_in);
  f(d.w_rec);
  f(d.b);
  f(d.proj);
  f(d.out);
  f(d.out_bias);
}

template <typename M, typename F>
void ForEachBlock(M &m, F &&f) {
  f(m.lm.embed);
  ForEachDirectionBlock(m.lm.fwd, f);
  ForEachDirectionBlock(m.lm.bwd, f);
  f(m.ctx_decoder.weights);
  f(m.ctx_decoder.bias);
  f(m.desc_decoder.weights);
  f(m.desc_decoder.bias);
}

// Hidden and projected states, columns in processing order.
struct Trace {
  MatrixXd h;
  MatrixXd z;
};

int PositionOf(std::size_t step, std::size_t n, bool reverse) {
  return static_cast<int>(reverse ? n - 1 - step : step);
}

Trace Run(const ToyBiLM &lm, const RnnDirection &d, std::span<const int> ids,
          bool reverse) {
  const auto n = ids.size();
  Trace t;
  t.h.resize(d.w_rec.rows(), static_cast<Eigen::Index>(n));
  VectorXd prev = VectorXd::Zero(d.w_rec.rows());
  for (std::size_t s = 0; s < n; ++s) {
    const int id = ids[PositionOf(s, n, reverse)];
    const VectorXd a = d.w_in * lm.embed.col(id) + d.w_rec * prev + d.b;
    t.h.col(static_cast<Eigen::Index>(s)) = a.array().tanh().matrix();
    prev = t.h.col(static_cast<Eigen::Index>(s));
  }
  t.z = d.proj * t.h;
  return t;
}

// Backpropagation through time given dL/dz for every processing step.
void Backprop(const ToyBiLM &lm, const RnnDirection &d, std::span<const int> ids,
              bool reverse, const Trace &t, const MatrixXd &dz,
              RnnDirection *gd, MatrixXd *g_embed) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  gd->proj += dz * t.h.transpose();
  const MatrixXd dh = d.proj.transpose() * dz;
  VectorXd carry = VectorXd::Zero(d.w_rec.rows());
  for (Eigen::Index s = n - 1; s >= 0; --s) {
    const VectorXd g = dh.col(s) + carry;
    const VectorXd da =
        g.cwiseProduct((1.0 - t.h.col(s).array().square()).matrix());
    const int id = ids[PositionOf(static_cast<std::size_t>(s), ids.size(), reverse)];
    gd->b += da;
    gd->w_in += da * lm.embed.col(id).transpose();
    g_embed->col(id) += d.w_in.transpose() * da;
    if (s > 0) {
      gd->w_rec += da * t.h.col(s - 1).transpose();
      carry = d.w_rec.transpose() * da;
    }
  }
}

// The sampled softmax collapses to the exact one when the negatives cover
// the full complement of the target; both then take the dense code path, so
// the two modes agree bit for bit.
bool ExactSoftmax(const LossOptions &opts, int vocab) {
  return opts.softmax == SoftmaxMode::kFull || opts.negatives >= vocab - 1;
}

// Target plus K sampled negatives, in ascending id order.
struct Support {
  std::vector<int> ids;
  Eigen::Index target = 0;  // position of the target in ids
};

Support SampleSupport(int vocab, int target, int negatives,
                      std::mt19937_64 *rng) {
  if (negatives < 1) throw std::invalid_argument("need at least one negative");
  if (rng == nullptr) throw std::invalid_argument("sampled softmax needs an rng");
  // Floyd's sampling of K distinct values from [0, vocab - 1), then shifted
  // past the target.
  const int n = vocab - 1;
  std::unordered_set<int> chosen;
  for (int j = n - negatives; j < n; ++j) {
    const int t = std::uniform_int_distribution<int>(0, j)(*rng);
    chosen.insert(chosen.count(t) ? j : t);
  }
  Support s;
  for (int v : chosen) s.ids.push_back(v >= target ? v + 1 : v);
  s.ids.push_back(target);
  std::sort(s.ids.begin(), s.ids.end());
  s.target = std::lower_bound(s.ids.begin(), s.ids.end(), target) - s.ids.begin();
  return s;
}

// Up to `cap` targets chosen uniformly without replacement, in their
// original order.
std::vector<int> CapPositives(std::span<const int> targets, int cap,
                              std::mt19937_64 *rng) {
  if (static_cast<int>(targets.size()) <= cap) {
    return {targets.begin(), targets.end()};
  }
  if (rng == nullptr) throw std::invalid_argument("positive cap needs an rng");
  const int n = static_cast<int>(targets.size());
  std::unordered_set<int> chosen;
  for (int j = n - cap; j < n; ++j) {
    const int t = std::uniform_int_distribution<int>(0, j)(*rng);
    chosen.insert(chosen.count(t) ? j : t);
  }
  std::vector<int> pos(chosen.begin(), chosen.end());
  std::sort(pos.begin(), pos.end());
  std::vector<int> out;
  for (int p : pos) out.push_back(targets[p]);
  return out;
}

// Sampled softmax: -log softmax(w x + b) at the target over the support
// rows only.
double SampledNll(const MatrixXd &w, const VectorXd &b, const VectorXd &x,
                  const Support &support, MatrixXd *gw, VectorXd *gb,
                  VectorXd *gx) {
  const auto k = static_cast<Eigen::Index>(support.ids.size());
  VectorXd logits(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    logits(i) = w.row(support.ids[i]).dot(x) + b(support.ids[i]);
  }
  const double m = logits.maxCoeff();
  const VectorXd e = (logits.array() - m).exp().matrix();
  const double z = e.sum();
  const double loss = std::log(z) + m - logits(support.target);
  if (gw != nullptr) {
    VectorXd d = e / z;
    d(support.target) -= 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      gw->row(support.ids[i]) += d(i) * x.transpose();
      (*gb)(support.ids[i]) += d(i);
      *gx += d(i) * w.row(support.ids[i]).transpose();
    }
  }
  return loss;
}

// Exact softmax over every column of `inputs`, column c predicting
// targets[c]. `d_inputs` receives dL/d inputs when gradients are wanted.
double DenseNll(const MatrixXd &w, const VectorXd &b, const MatrixXd &inputs,
                const std::vector<int> &targets, MatrixXd *gw, VectorXd *gb,
                MatrixXd *d_inputs) {
  MatrixXd probs = w * inputs;
  probs.colwise() += b;
  double loss = 0.0;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    auto col = probs.col(c);
    const double m = col.maxCoeff();
    const double target_logit = col(targets[c]);
    col = (col.array() - m).exp().matrix();
    const double z = col.sum();
    loss += std::log(z) + m - target_logit;
    col /= z;
    col(targets[c]) -= 1.0;
  }
  if (gw != nullptr) {
    gw->noalias() += probs * inputs.transpose();
    *gb += probs.rowwise().sum();
    d_inputs->noalias() = w.transpose() * probs;
  }
  return loss;
}

void CheckIds(const ToyModel &model, std::span<const int> ids) {
  for (int id : ids) {
    if (id < 0 || id >= model.vocab_size()) {
      throw std::out_of_range("token id outside the vocabulary: " +
                              std::to_string(id));
    }
  }
}

// Bag-of-words loss of `targets` given the mean contextual state of
// seq[first..last].
double BowLoss(const ToyModel &model, BowDecoder ToyModel::*decoder,
               std::span<const int> seq, std::size_t first, std::size_t last,
               std::span<const int> targets, const LossOptions &opts,
               std::mt19937_64 *rng, ToyModel *grad) {
  if (opts.positive_cap < 1) {
    throw std::invalid_argument("positive cap must be at least 1");
  }
  CheckIds(model, seq);
  CheckIds(model, targets);
  if (first > last || last >= seq.size()) {
    throw std::out_of_range("contextual span outside the sequence");
  }
  const auto n = seq.size();
  const Trace f = Run(model.lm, model.lm.fwd, seq, false);
  const Trace b = Run(model.lm, model.lm.bwd, seq, true);
  const int p = model.projected();
  VectorXd cond = VectorXd::Zero(2 * p);
  for (std::size_t k = first; k <= last; ++k) {
    cond.head(p) += f.z.col(static_cast<Eigen::Index>(k));
    cond.tail(p) += b.z.col(static_cast<Eigen::Index>(n - 1 - k));
  }
  const double width = static_cast<double>(last - first + 1);
  cond /= width;

  const BowDecoder &dec = model.*decoder;
  BowDecoder *gdec = grad ? &(grad->*decoder) : nullptr;
  VectorXd gcond = VectorXd::Zero(2 * p);
  double loss = 0.0;
  const auto positives = CapPositives(targets, opts.positive_cap, rng);
  if (ExactSoftmax(opts, model.vocab_size())) {
    // One conditioning vector, so one logit vector serves every positive.
    const VectorXd logits = dec.weights * cond + dec.bias;
    const double m = logits.maxCoeff();
    const VectorXd e = (logits.array() - m).exp().matrix();
    const double z = e.sum();
    const double lse = std::log(z) + m;
    VectorXd d = static_cast<double>(positives.size()) * (e / z);
    for (int t : positives) {
      loss += lse - logits(t);
      d(t) -= 1.0;
    }
    if (gdec != nullptr) {
      gdec->weights.noalias() += d * cond.transpose();
      gdec->bias += d;
      gcond.noalias() += dec.weights.transpose() * d;
    }
  } else {
    for (int t : positives) {
      const auto support = SampleSupport(model.vocab_size(), t, opts.negatives, rng);
      loss += SampledNll(dec.weights, dec.bias, cond, support,
                         gdec ? &gdec->weights : nullptr,
                         gdec ? &gdec->bias : nullptr, &gcond);
    }
  }
  if (grad != nullptr) {
    gcond /= width;
    MatrixXd dzf = MatrixXd::Zero(p, static_cast<Eigen::Index>(n));
    MatrixXd dzb = MatrixXd::Zero(p, static_cast<Eigen::Index>(n));
    for (std::size_t k = first; k <= last; ++k) {
      dzf.col(static_cast<Eigen::Index>(k)) = gcond.head(p);
      dzb.col(static_cast<Eigen::Index>(n - 1 - k)) = gcond.tail(p);
    }
    Backprop(model.lm, model.lm.fwd, seq, false, f, dzf, &grad->lm.fwd,
             &grad->lm.embed);
    Backprop(model.lm, model.lm.bwd, seq, true, b, dzb, &grad->lm.bwd,
             &grad->lm.embed);
  }
  return loss;
}

void CheckPair(const EncodedPair &pair) {
  if (pair.context.empty() || pair.description.empty()) {
    throw std::invalid_argument("pair needs a nonempty context and description");
  }
  if (pair.span.start > pair.span.end || pair.span.end >= pair.context.size()) {
    throw std::out_of_range("mention span outside the context");
  }
}

std::vector<int> Prepend(int head, const std::vector<int> &tail) {
  std::vector<int> out{head};
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

LossBreakdown MeanLossWith(const ToyModel &model, const SpecialIds &ids,
                           const std::vector<EncodedPair> &pairs,
                           Variant variant, const LossOptions &opts,
                           std::mt19937_64 *rng, ToyModel *grad) {
  if (pairs.empty()) throw std::invalid_argument("no training pairs");
  LossBreakdown sum;
  for (const auto &pair : pairs) {
    const auto l = TotalLoss(model, ids, pair, variant, opts, rng, grad);
    sum.lang_context += l.lang_context;
    sum.lang_description += l.lang_description;
    sum.reconstruct_context += l.reconstruct_context;
    sum.reconstruct_description += l.reconstruct_description;
    sum.total += l.total;
  }
  const double n = static_cast<double>(pairs.size());
  sum.lang_context /= n;
  sum.lang_description /= n;
  sum.reconstruct_context /= n;
  sum.reconstruct_description /= n;
  sum.total /= n;
  if (grad != nullptr) {
    ForEachBlock(*grad, [n](auto &m) { m /= n; });
  }
  return sum;
}

}  // namespace

void Vocab::Add(const std::string &token) {
  if (ids_.count(token)) return;
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocab Vocab::Build(const std::vector<std::vector<std::string>> &corpus,
                   std::size_t max_size) {
  Vocab v;
  for (const char *s : {kUnk, kBod, kBoc, kSentenceStart, kSentenceEnd}) v.Add(s);
  std::map<std::string, long> counts;
  for (const auto &seq : corpus) {
    for (const auto &t : seq) {
      if (!v.ids_.count(t)) ++counts[t];
    }
  }
  std::vector<std::pair<std::string, long>> order(counts.begin(), counts.end());
  std::stable_sort(order.begin(), order.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  for (const auto &[tok, c] : order) {
    if (max_size > 0 && v.tokens_.size() >= max_size) break;
    v.Add(tok);
  }
  return v;
}

Vocab Vocab::Synthetic(int extra) {
  Vocab v;
  for (const char *s : {kUnk, kBod, kBoc, kSentenceStart, kSentenceEnd}) v.Add(s);
  for (int i = 0; i < extra; ++i) v.Add("w" + std::to_string(i));
  return v;
}

int Vocab::Id(const std::string &token) const {
  const auto it = ids_.find(token);
  return it == ids_.end() ? unk() : it->second;
}

std::vector<int> Vocab::Encode(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) out.push_back(Id(t));
  return out;
}

ToyModel ToyModel::ZerosLike() const {
  ToyModel z = *this;
  ForEachBlock(z, [](auto &m) { m.setZero(); });
  return z;
}

Eigen::Index ToyModel::n_params() const {
  Eigen::Index n = 0;
  ForEachBlock(*this, [&n](const auto &m) { n += m.size(); });
  return n;
}

VectorXd ToyModel::Flatten() const {
  VectorXd flat(n_params());
  Eigen::Index at = 0;
  ForEachBlock(*this, [&](const auto &m) {
    flat.segment(at, m.size()) = m.reshaped();
    at += m.size();
  });
  return flat;
}

void ToyModel::Unflatten(const VectorXd &flat) {
  if (flat.size() != n_params()) {
    throw std::invalid_argument("parameter vector has the wrong size");
  }
  Eigen::Index at = 0;
  ForEachBlock(*this, [&](auto &m) {
    m.reshaped() = flat.segment(at, m.size());
    at += m.size();
  });
}

void ToyModel::AddScaled(const ToyModel &other, double scale) {
  Unflatten(Flatten() + scale * other.Flatten());
}

bool ToyModel::AllFinite() const {
  bool ok = true;
  ForEachBlock(*this, [&ok](const auto &m) { ok = ok && m.allFinite(); });
  return ok;
}

ToyModel InitModel(const ModelDims &dims, std::uint64_t seed,
                   double init_scale) {
  if (dims.vocab < 2 || dims.embed < 1 || dims.hidden < 1 ||
      dims.projected < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-init_scale, init_scale);
  auto fill = [&](MatrixXd &m, Eigen::Index r, Eigen::Index c) {
    m.resize(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
    }
  };
  ToyModel m;
  fill(m.lm.embed, dims.embed, dims.vocab);
  for (RnnDirection *d : {&m.lm.fwd, &m.lm.bwd}) {
    fill(d->w_in, dims.hidden, dims.embed);
    fill(d->w_rec, dims.hidden, dims.hidden);
    d->b = VectorXd::Zero(dims.hidden);
    fill(d->proj, dims.projected, dims.hidden);
    fill(d->out, dims.vocab, dims.projected);
    d->out_bias = VectorXd::Zero(dims.vocab);
  }
  for (BowDecoder *d : {&m.ctx_decoder, &m.desc_decoder}) {
    fill(d->weights, dims.vocab, 2 * dims.projected);
    d->bias = VectorXd::Zero(dims.vocab);
  }
  return m;
}

EncodedPair EncodePair(const Vocab &vocab, const MentionContext &context,
                       const EntityDescription &description) {
  EncodedPair p;
  p.context = vocab.Encode(context.tokens);
  p.span = context.span;
  p.description = vocab.Encode(description.tokens);
  CheckPair(p);
  return p;
}

double LangLoss(const ToyModel &model, std::span<const int> tokens,
                const LossOptions &opts, std::mt19937_64 *rng,
                ToyModel *grad) {
  if (tokens.empty()) throw std::invalid_argument("empty sequence");
  CheckIds(model, tokens);
  std::vector<int> seq;
  if (opts.pad_boundaries) seq.push_back(3);
  seq.insert(seq.end(), tokens.begin(), tokens.end());
  if (opts.pad_boundaries) seq.push_back(4);
  const auto n = seq.size();
  if (n < 2) return 0.0;

  const ToyBiLM &lm = model.lm;
  const Trace f = Run(lm, lm.fwd, seq, false);
  const Trace b = Run(lm, lm.bwd, seq, true);
  const int p = model.projected();
  MatrixXd dzf = MatrixXd::Zero(p, static_cast<Eigen::Index>(n));
  MatrixXd dzb = MatrixXd::Zero(p, static_cast<Eigen::Index>(n));
  double loss = 0.0;
  // Processing step s (s < n - 1) predicts seq[s + 1] going forward and
  // seq[n - 2 - s] going backward.
  for (const bool backward : {false, true}) {
    const RnnDirection &d = backward ? lm.bwd : lm.fwd;
    RnnDirection *gd = grad ? (backward ? &grad->lm.bwd : &grad->lm.fwd) : nullptr;
    const MatrixXd &z = backward ? b.z : f.z;
    MatrixXd &dz = backward ? dzb : dzf;
    std::vector<int> targets(n - 1);
    for (std::size_t s = 0; s + 1 < n; ++s) {
      targets[s] = backward ? seq[n - 2 - s] : seq[s + 1];
    }
    const auto steps = static_cast<Eigen::Index>(n - 1);
    if (ExactSoftmax(opts, model.vocab_size())) {
      MatrixXd dinputs;
      loss += DenseNll(d.out, d.out_bias, z.leftCols(steps), targets,
                       gd ? &gd->out : nullptr, gd ? &gd->out_bias : nullptr,
                       &dinputs);
      if (gd != nullptr) dz.leftCols(steps) = dinputs;
      continue;
    }
    for (Eigen::Index s = 0; s < steps; ++s) {
      VectorXd gz = VectorXd::Zero(p);
      const auto support =
          SampleSupport(model.vocab_size(), targets[s], opts.negatives, rng);
      loss += SampledNll(d.out, d.out_bias, z.col(s), support,
                         gd ? &gd->out : nullptr, gd ? &gd->out_bias : nullptr,
                         &gz);
      dz.col(s) = gz;
    }
  }
  if (grad != nullptr) {
    Backprop(lm, lm.fwd, seq, false, f, dzf, &grad->lm.fwd, &grad->lm.embed);
    Backprop(lm, lm.bwd, seq, true, b, dzb, &grad->lm.bwd, &grad->lm.embed);
  }
  return loss;
}

VectorXd ContextualSpan(const ToyModel &model, std::span<const int> tokens,
                        std::size_t first, std::size_t last) {
  CheckIds(model, tokens);
  if (first > last || last >= tokens.size()) {
    throw std::out_of_range("contextual span outside the sequence");
  }
  const Trace f = Run(model.lm, model.lm.fwd, tokens, false);
  const Trace b = Run(model.lm, model.lm.bwd, tokens, true);
  const int p = model.projected();
  VectorXd out = VectorXd::Zero(2 * p);
  for (std::size_t k = first; k <= last; ++k) {
    out.head(p) += f.z.col(static_cast<Eigen::Index>(k));
    out.tail(p) += b.z.col(static_cast<Eigen::Index>(tokens.size() - 1 - k));
  }
  return out / static_cast<double>(last - first + 1);
}

double DescLoss(const ToyModel &model, int boc_id, const EncodedPair &pair,
                const LossOptions &opts, std::mt19937_64 *rng,
                ToyModel *grad) {
  CheckPair(pair);
  const auto seq = Prepend(boc_id, pair.context);
  return BowLoss(model, &ToyModel::desc_decoder, seq, pair.span.start + 1,
                 pair.span.end + 1, pair.description, opts, rng, grad);
}

double CtxLoss(const ToyModel &model, int bod_id, const EncodedPair &pair,
               const LossOptions &opts, std::mt19937_64 *rng, ToyModel *grad) {
  CheckPair(pair);
  const auto seq = Prepend(bod_id, pair.description);
  return BowLoss(model, &ToyModel::ctx_decoder, seq, 1, seq.size() - 1,
                 pair.context, opts, rng, grad);
}

double EtnLoss(const ToyModel &model, int bod_id, const EncodedPair &pair,
               const LossOptions &opts, std::mt19937_64 *rng, ToyModel *grad) {
  CheckPair(pair);
  const auto seq = Prepend(bod_id, pair.description);
  const std::span<const int> mention(pair.context.data() + pair.span.start,
                                     pair.span.size());
  return BowLoss(model, &ToyModel::ctx_decoder, seq, 1, seq.size() - 1,
                 mention, opts, rng, grad);
}

const char *VariantName(Variant v) {
  switch (v) {
    case Variant::kFull:
      return "full";
    case Variant::kNoCtx:
      return "no_ctx";
    case Variant::kEtn:
      return "etn";
  }
  return "?";
}

Variant ParseVariant(const std::string &name) {
  for (Variant v : {Variant::kFull, Variant::kNoCtx, Variant::kEtn}) {
    if (name == VariantName(v)) return v;
  }
  throw std::invalid_argument("unknown variant: " + name);
}

LossBreakdown TotalLoss(const ToyModel &model, const SpecialIds &ids,
                        const EncodedPair &pair, Variant variant,
                        const LossOptions &opts, std::mt19937_64 *rng,
                        ToyModel *grad) {
  CheckPair(pair);
  LossBreakdown l;
  l.lang_context = LangLoss(model, pair.context, opts, rng, grad);
  l.lang_description = LangLoss(model, pair.description, opts, rng, grad);
  switch (variant) {
    case Variant::kFull:
      l.reconstruct_context = CtxLoss(model, ids.bod, pair, opts, rng, grad);
      break;
    case Variant::kEtn:
      l.reconstruct_context = EtnLoss(model, ids.bod, pair, opts, rng, grad);
      break;
    case Variant::kNoCtx:
      break;
  }
  l.reconstruct_description = DescLoss(model, ids.boc, pair, opts, rng, grad);
  l.total = l.lang_context + l.lang_description + l.reconstruct_context +
            l.reconstruct_description;
  return l;
}

double GradCheck(const ToyModel &model, const SpecialIds &ids,
                 const EncodedPair &pair, Variant variant, double epsilon,
                 const LossOptions &opts, double floor) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  LossOptions full = opts;
  full.softmax = SoftmaxMode::kFull;
  constexpr std::uint64_t kSamplerSeed = 17;

  ToyModel grad = model.ZerosLike();
  std::mt19937_64 rng(kSamplerSeed);
  TotalLoss(model, ids, pair, variant, full, &rng, &grad);
  const VectorXd analytic = grad.Flatten();

  ToyModel probe = model;
  VectorXd theta = model.Flatten();
  auto eval = [&](const VectorXd &x) {
    probe.Unflatten(x);
    std::mt19937_64 r(kSamplerSeed);
    return TotalLoss(probe, ids, pair, variant, full, &r).total;
  };
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double keep = theta(i);
    theta(i) = keep + epsilon;
    const double up = eval(theta);
    theta(i) = keep - epsilon;
    const double down = eval(theta);
    theta(i) = keep;
    const double numeric = (up - down) / (2 * epsilon);
    const double denom =
        std::max({std::abs(analytic(i)), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic(i) - numeric) / denom);
  }
  return worst;
}

LossBreakdown MeanLoss(const ToyModel &model, const SpecialIds &ids,
                       const std::vector<EncodedPair> &pairs, Variant variant,
                       const LossOptions &opts, std::uint64_t seed,
                       ToyModel *grad) {
  std::mt19937_64 rng(seed);
  return MeanLossWith(model, ids, pairs, variant, opts, &rng, grad);
}

std::vector<CurvePoint> Train(ToyModel *model, const SpecialIds &ids,
                              const std::vector<EncodedPair> &pairs,
                              const TrainOptions &opts) {
  if (opts.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!(opts.learning_rate > 0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::mt19937_64 rng(opts.seed);
  const Eigen::Index n = model->n_params();
  VectorXd m1 = VectorXd::Zero(n), m2 = VectorXd::Zero(n);
  std::vector<CurvePoint> curve;
  for (int step = 0; step < opts.steps; ++step) {
    ToyModel grad = model->ZerosLike();
    const auto loss = MeanLossWith(*model, ids, pairs, opts.variant, opts.loss,
                                   &rng, &grad);
    curve.push_back({step, loss});
    const VectorXd g = grad.Flatten();
    m1 = kBeta1 * m1 + (1 - kBeta1) * g;
    m2 = kBeta2 * m2 + (1 - kBeta2) * g.cwiseProduct(g);
    const double c1 = 1 - std::pow(kBeta1, step + 1);
    const double c2 = 1 - std::pow(kBeta2, step + 1);
    const VectorXd update =
        ((m1 / c1).array() / ((m2 / c2).array().sqrt() + kEps)).matrix();
    model->Unflatten(model->Flatten() - opts.learning_rate * update);
    if (!model->AllFinite()) {
      throw std::runtime_error("toy training diverged at step " +
                               std::to_string(step));
    }
  }
  curve.push_back({opts.steps, MeanLossWith(*model, ids, pairs, opts.variant,
                                            opts.loss, &rng, nullptr)});
  return curve;
}

void WriteCurve(const std::vector<CurvePoint> &curve, Variant variant,
                std::ostream &out) {
  out << "step\tvariant\ttotal\tlang_context\tlang_description\t"
         "reconstruct_context\treconstruct_description\n";
  char buf[256];
  for (const auto &p : curve) {
    std::snprintf(buf, sizeof(buf), "%d\t%s\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n",
                  p.step, VariantName(variant), p.mean.total,
                  p.mean.lang_context, p.mean.lang_description,
                  p.mean.reconstruct_context, p.mean.reconstruct_description);
    out << buf;
  }
}

}  // namespace enteval::toy
