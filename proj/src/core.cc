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

#include "enteval/core.h"

#include <algorithm>
#include <numeric>

namespace enteval {

namespace {

bool HasUpperAscii(const std::string &s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return c >= 'A' && c <= 'Z'; });
}

}  // namespace

void MentionContext::Validate() const {
  if (tokens.empty()) {
    throw std::invalid_argument("mention " + instance_id + ": empty context");
  }
  if (span.start > span.end || span.end >= tokens.size()) {
    throw std::invalid_argument(
        "mention " + instance_id + ": span [" + std::to_string(span.start) +
        ", " + std::to_string(span.end) + "] outside " +
        std::to_string(tokens.size()) + " tokens");
  }
  for (const auto &t : tokens) {
    if (HasUpperAscii(t)) {
      throw std::invalid_argument("mention " + instance_id +
                                  ": token not lowercased: " + t);
    }
  }
}

void EntityDescription::Validate() const {
  if (tokens.empty()) {
    throw std::invalid_argument("description " + entity_id + " is empty");
  }
  if (tokens.size() > kMaxDescriptionTokens) {
    throw std::invalid_argument("description " + entity_id + " has " +
                                std::to_string(tokens.size()) + " tokens");
  }
}

const char *PairGroupName(PairGroup group) {
  return group == PairGroup::kSame ? "same" : "next";
}

PairGroup ParsePairGroup(const std::string &name) {
  if (name == "same") return PairGroup::kSame;
  if (name == "next") return PairGroup::kNext;
  throw std::invalid_argument("unknown pair group: " + name);
}

void TypedInstance::Validate() const {
  mention.Validate();
  if (gold_types.empty()) {
    throw std::invalid_argument("typed instance " + mention.instance_id +
                                " has no gold types");
  }
  if (*gold_types.begin() < 0 || *gold_types.rbegin() >= kNumEntityTypes) {
    throw DataError("typed instance " + mention.instance_id +
                    ": type id out of range");
  }
}

std::string Lowercase(std::string text) {
  for (char &c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return text;
}

std::vector<double> FractionalRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("Pearson: length mismatch");
  }
  const std::size_t n = a.size();
  if (n < 2) throw UndefinedCorrelation("correlation needs at least 2 points");
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw UndefinedCorrelation("correlation undefined: zero variance");
  }
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double Spearman(std::span<const double> pred, std::span<const double> gold) {
  if (pred.size() != gold.size()) {
    throw std::invalid_argument("Spearman: length mismatch");
  }
  if (pred.size() < 2) {
    throw UndefinedCorrelation("Spearman needs at least 2 points");
  }
  const auto rp = FractionalRanks(pred);
  const auto rg = FractionalRanks(gold);
  return Pearson(rp, rg);
}

namespace {

std::size_t IntersectionSize(const std::set<int> &a, const std::set<int> &b) {
  std::size_t n = 0;
  for (int x : a) n += b.count(x);
  return n;
}

double Harmonic(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

PrecisionRecallF1 MultilabelF1(const std::vector<std::set<int>> &predicted,
                               const std::vector<std::set<int>> &gold) {
  if (predicted.size() != gold.size()) {
    throw std::invalid_argument("MultilabelF1: instance count mismatch");
  }
  double p_sum = 0.0, r_sum = 0.0;
  std::size_t p_count = 0, r_count = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const std::size_t hits = IntersectionSize(predicted[i], gold[i]);
    if (!predicted[i].empty()) {
      p_sum += static_cast<double>(hits) / predicted[i].size();
      ++p_count;
    }
    if (!gold[i].empty()) {
      r_sum += static_cast<double>(hits) / gold[i].size();
      ++r_count;
    }
  }
  PrecisionRecallF1 out;
  out.precision = p_count > 0 ? p_sum / p_count : 0.0;
  out.recall = r_count > 0 ? r_sum / r_count : 0.0;
  out.f1 = Harmonic(out.precision, out.recall);
  return out;
}

PrecisionRecallF1 MultilabelMicroF1(const std::vector<std::set<int>> &predicted,
                                    const std::vector<std::set<int>> &gold) {
  if (predicted.size() != gold.size()) {
    throw std::invalid_argument("MultilabelMicroF1: instance count mismatch");
  }
  std::size_t hits = 0, n_pred = 0, n_gold = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    hits += IntersectionSize(predicted[i], gold[i]);
    n_pred += predicted[i].size();
    n_gold += gold[i].size();
  }
  PrecisionRecallF1 out;
  out.precision = n_pred > 0 ? static_cast<double>(hits) / n_pred : 0.0;
  out.recall = n_gold > 0 ? static_cast<double>(hits) / n_gold : 0.0;
  out.f1 = Harmonic(out.precision, out.recall);
  return out;
}

}  // namespace enteval
