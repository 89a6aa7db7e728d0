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

#include "enteval/datagen.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "enteval/probe.h"
#include "enteval/text.h"
#include "enteval/wikient.h"
#include "json.hpp"
#include "jsonl.h"

namespace enteval {

using nlohmann::json;
using internal::ForEachJsonLine;

namespace fs = std::filesystem;

namespace {

std::string Join(std::span<const std::string> tokens) {
  std::string out;
  for (const auto &t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::vector<std::string> Lowered(std::vector<std::string> tokens) {
  for (auto &t : tokens) t = Lowercase(std::move(t));
  return tokens;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t tab = line.find('\t', begin);
    out.push_back(line.substr(begin, tab - begin));
    if (tab == std::string::npos) break;
    begin = tab + 1;
  }
  return out;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

Span GetSpan(const json &j) {
  const auto v = j.get<std::vector<std::size_t>>();
  if (v.size() != 2 || v[0] > v[1]) {
    throw std::invalid_argument("span must be [start, end] with start <= end");
  }
  return {v[0], v[1]};
}

std::string GetId(const json &j) {
  return j.is_string() ? j.get<std::string>() : j.dump();
}

std::optional<Eigen::VectorXd> MeanVector(const WordVectorTable &table,
                                          std::span<const std::string> tokens) {
  AvgvecStats stats;
  Eigen::VectorXd v = AverageWordVectors(table, tokens, &stats).cast<double>();
  if (stats.all_oov > 0 || v.norm() == 0.0) return std::nullopt;
  return v;
}

// Shuffled draw of `targets` (or a proportional share) from `n` items;
// each split keeps source order.
std::array<std::vector<std::size_t>, 3> SampleSplits(std::size_t n,
                                                     const SplitSizes &targets,
                                                     SeededRng *rng,
                                                     const std::string &task,
                                                     GenReport *report) {
  const SplitSizes sizes = AllocateSplits(n, targets);
  if (sizes != targets) {
    report->Warn(task + ": only " + std::to_string(n) +
                 " instances available; splits scaled down");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng->Shuffle(&order);
  std::array<std::vector<std::size_t>, 3> out;
  std::size_t pos = 0;
  for (int s = 0; s < 3; ++s) {
    out[s].assign(order.begin() + pos, order.begin() + pos + sizes[s]);
    std::sort(out[s].begin(), out[s].end());
    pos += sizes[s];
  }
  return out;
}

template <typename Row>
SplitRows<Row> Pick(const std::vector<Row> &pool,
                    const std::array<std::vector<std::size_t>, 3> &index) {
  SplitRows<Row> out;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t k : index[s]) out[s].push_back(pool[k]);
  }
  return out;
}

}  // namespace

std::uint64_t SeededRng::Below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("SeededRng::Below(0)");
  // 2^64 mod n; draws below it would bias the low residues.
  const std::uint64_t floor = (0 - n) % n;
  while (true) {
    const std::uint64_t x = engine_();
    if (x >= floor) return x % n;
  }
}

SplitSizes AllocateSplits(std::size_t available, const SplitSizes &targets) {
  const std::size_t total = targets[0] + targets[1] + targets[2];
  if (available >= total) return targets;
  SplitSizes out{};
  std::array<std::size_t, 3> remainder{};
  std::size_t given = 0;
  for (int s = 0; s < 3; ++s) {
    out[s] = available * targets[s] / total;
    remainder[s] = available * targets[s] % total;
    given += out[s];
  }
  while (given < available) {
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      if (remainder[s] > remainder[best]) best = s;
    }
    ++out[best];
    remainder[best] = 0;
    ++given;
  }
  return out;
}

// ---------------------------------------------------------------- CAP

std::vector<CorefDocument> ReadCorefDocuments(const std::string &path) {
  std::vector<CorefDocument> docs;
  ForEachJsonLine(path, [&](const json &j) {
    CorefDocument d;
    d.id = GetId(j.at("id"));
    for (const auto &s : j.at("sentences")) {
      d.sentences.push_back(Lowered(s.get<std::vector<std::string>>()));
    }
    int cluster = 0;
    for (const auto &c : j.at("mention_clusters")) {
      for (const auto &m : c) {
        const auto v = m.get<std::vector<std::size_t>>();
        if (v.size() != 3 || v[0] >= d.sentences.size() || v[1] >= v[2] ||
            v[2] > d.sentences[v[0]].size()) {
          throw std::invalid_argument("document " + d.id + ": bad mention " +
                                      m.dump());
        }
        d.mentions.push_back({v[0], {v[1], v[2] - 1}, cluster});
      }
      ++cluster;
    }
    std::sort(d.mentions.begin(), d.mentions.end(),
              [](const CorefMention &a, const CorefMention &b) {
                return std::tie(a.sentence, a.span.start, a.span.end,
                                a.cluster) < std::tie(b.sentence, b.span.start,
                                                      b.span.end, b.cluster);
              });
    // The same span listed twice keeps its first cluster.
    d.mentions.erase(
        std::unique(d.mentions.begin(), d.mentions.end(),
                    [](const CorefMention &a, const CorefMention &b) {
                      return a.sentence == b.sentence && a.span == b.span;
                    }),
        d.mentions.end());
    docs.push_back(std::move(d));
  });
  return docs;
}

bool IsPronoun(const std::string &token) {
  static const std::set<std::string> kPronouns = {
      "i",      "me",       "my",         "mine",      "myself",
      "you",    "your",     "yours",      "yourself",  "yourselves",
      "he",     "him",      "his",        "himself",   "she",
      "her",    "hers",     "herself",    "it",        "its",
      "itself", "we",       "us",         "our",       "ours",
      "ourselves", "they",  "them",       "their",     "theirs",
      "themselves"};
  return kPronouns.count(Lowercase(token)) > 0;
}

namespace {

bool PronounMention(const std::vector<std::string> &sentence, Span span) {
  return span.size() == 1 && IsPronoun(sentence[span.start]);
}

}  // namespace

std::vector<PairInstance> CapCandidates(const CorefDocument &doc,
                                        GenReport *report) {
  std::vector<PairInstance> out;
  const auto &ms = doc.mentions;
  for (std::size_t a = 0; a < ms.size(); ++a) {
    for (std::size_t b = a + 1; b < ms.size(); ++b) {
      const std::size_t gap = ms[b].sentence - ms[a].sentence;
      if (gap > 1) break;
      const auto &s1 = doc.sentences[ms[a].sentence];
      const auto &s2 = doc.sentences[ms[b].sentence];
      if (PronounMention(s1, ms[a].span) && PronounMention(s2, ms[b].span)) {
        report->Add("cap.dropped_pronoun_pairs");
        continue;
      }
      PairInstance p;
      p.id = doc.id + "/" + std::to_string(a) + "/" + std::to_string(b);
      p.label = ms[a].cluster == ms[b].cluster ? 1 : 0;
      p.group = gap == 0 ? PairGroup::kSame : PairGroup::kNext;
      std::vector<std::string> tokens = s1;
      Span right = ms[b].span;
      if (gap == 1) {
        tokens.insert(tokens.end(), s2.begin(), s2.end());
        right.start += s1.size();
        right.end += s1.size();
      }
      p.left = {PairEmbeddingId(p.id, 1), tokens, ms[a].span};
      p.right = {PairEmbeddingId(p.id, 2), std::move(tokens), right};
      out.push_back(std::move(p));
    }
  }
  return out;
}

namespace {

// Spreads `total` over bins as evenly as their capacities allow; leftovers
// go to the lowest-index bins.
std::vector<std::size_t> FillBins(const std::vector<std::size_t> &capacity,
                                  std::size_t total) {
  std::vector<std::size_t> quota(capacity.size(), 0);
  while (total > 0) {
    std::vector<std::size_t> open;
    for (std::size_t b = 0; b < capacity.size(); ++b) {
      if (quota[b] < capacity[b]) open.push_back(b);
    }
    if (open.empty()) break;
    const std::size_t share = total / open.size();
    if (share == 0) {
      for (std::size_t k = 0; k < total; ++k) ++quota[open[k]];
      break;
    }
    for (std::size_t b : open) {
      const std::size_t add = std::min(share, capacity[b] - quota[b]);
      quota[b] += add;
      total -= add;
    }
  }
  return quota;
}

}  // namespace

SplitRows<PairInstance> GenCap(const std::vector<CorefDocument> &docs,
                               const WordVectorTable &wordvec,
                               const SplitSpec &spec, GenReport *report) {
  SeededRng rng(spec.seed);
  SplitRows<PairInstance> out;
  if (spec.cap_bins < 1) throw std::invalid_argument("cap_bins must be >= 1");
  std::vector<PairInstance> candidates;
  for (const auto &doc : docs) {
    for (auto &p : CapCandidates(doc, report)) candidates.push_back(std::move(p));
  }
  for (PairGroup group : {PairGroup::kSame, PairGroup::kNext}) {
    const std::string key = std::string("cap.") + PairGroupName(group);
    std::vector<PairInstance> pool;
    std::vector<double> cosine;
    for (const auto &p : candidates) {
      if (p.group != group) continue;
      report->Add(key + ".candidates");
      const auto v1 = MeanVector(wordvec, p.left.MentionTokens());
      const auto v2 = MeanVector(wordvec, p.right.MentionTokens());
      if (!v1 || !v2) {
        report->Add(key + ".dropped_oov");
        continue;
      }
      cosine.push_back(*Cosine(*v1, *v2));
      pool.push_back(p);
    }

    // Quantile bins by cosine.
    const std::size_t n = pool.size();
    const std::size_t n_bins = static_cast<std::size_t>(spec.cap_bins);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return cosine[a] < cosine[b];
                     });
    std::vector<std::vector<std::size_t>> pos(n_bins), neg(n_bins);
    std::vector<std::size_t> capacity(n_bins);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t b = r * n_bins / n;
      (pool[order[r]].label == 1 ? pos[b] : neg[b]).push_back(order[r]);
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
      capacity[b] = std::min(pos[b].size(), neg[b].size());
      if (capacity[b] == 0 && !(pos[b].empty() && neg[b].empty())) {
        report->Warn(key + ": bin " + std::to_string(b) +
                     " lacks positives or negatives; skipped");
      }
    }

    const SplitSizes targets =
        group == PairGroup::kSame ? spec.cap_same : spec.cap_next;
    const SplitSizes halves = {targets[0] / 2, targets[1] / 2, targets[2] / 2};
    const std::size_t available =
        std::accumulate(capacity.begin(), capacity.end(), std::size_t{0});
    const SplitSizes sizes = AllocateSplits(available, halves);
    if (sizes != halves) {
      report->Warn(key + ": only " + std::to_string(available) +
                   " balanced pairs available; splits scaled down");
    }
    const auto quota = FillBins(capacity, sizes[0] + sizes[1] + sizes[2]);

    std::vector<std::size_t> chosen_pos, chosen_neg;
    for (std::size_t b = 0; b < n_bins; ++b) {
      rng.Shuffle(&pos[b]);
      rng.Shuffle(&neg[b]);
      chosen_pos.insert(chosen_pos.end(), pos[b].begin(),
                        pos[b].begin() + quota[b]);
      chosen_neg.insert(chosen_neg.end(), neg[b].begin(),
                        neg[b].begin() + quota[b]);
    }
    rng.Shuffle(&chosen_pos);
    rng.Shuffle(&chosen_neg);
    std::size_t at = 0;
    for (int s = 0; s < 3; ++s) {
      std::vector<std::size_t> picked(chosen_pos.begin() + at,
                                      chosen_pos.begin() + at + sizes[s]);
      picked.insert(picked.end(), chosen_neg.begin() + at,
                    chosen_neg.begin() + at + sizes[s]);
      at += sizes[s];
      std::sort(picked.begin(), picked.end());
      for (std::size_t k : picked) out[s].push_back(pool[k]);
    }
    report->Add(key + ".kept", static_cast<long>(2 * at));
  }
  return out;
}

// ---------------------------------------------------------------- CERP

namespace {

bool ExcludedRelation(const std::string &relation) {
  return relation == "/r/RelatedTo" || relation == "/r/Synonym" ||
         relation == "/r/Translation";
}

bool IsNumericType(const std::string &type) {
  static const std::set<std::string> kTypes = {
      "DATE", "TIME", "PERCENT", "MONEY", "QUANTITY", "ORDINAL", "CARDINAL"};
  return kTypes.count(type) > 0;
}

// "[[a]] rel [[b]]" -> tokens and the two argument spans.
bool ParseSurface(const std::string &text, std::vector<std::string> *tokens,
                  std::array<Span, 2> *mentions) {
  tokens->clear();
  std::size_t pos = 0;
  for (int m = 0; m < 2; ++m) {
    const std::size_t open = text.find("[[", pos);
    if (open == std::string::npos) return false;
    const std::size_t close = text.find("]]", open + 2);
    if (close == std::string::npos) return false;
    for (auto &t : Tokenize(text.substr(pos, open - pos))) {
      tokens->push_back(std::move(t));
    }
    auto arg = Tokenize(text.substr(open + 2, close - open - 2));
    if (arg.empty()) return false;
    (*mentions)[m] = {tokens->size(), tokens->size() + arg.size() - 1};
    for (auto &t : arg) tokens->push_back(std::move(t));
    pos = close + 2;
  }
  if (text.find("[[", pos) != std::string::npos) return false;
  for (auto &t : Tokenize(text.substr(pos))) tokens->push_back(std::move(t));
  return true;
}

bool Inside(std::size_t i, Span s) { return i >= s.start && i <= s.end; }

// Replaces span `s` of `tokens` with `with`; returns the shift applied to
// later positions.
long Splice(std::vector<std::string> *tokens, Span s,
            const std::vector<std::string> &with) {
  tokens->erase(tokens->begin() + s.start, tokens->begin() + s.end + 1);
  tokens->insert(tokens->begin() + s.start, with.begin(), with.end());
  return static_cast<long>(with.size()) - static_cast<long>(s.size());
}

Span Shifted(Span s, std::size_t after, long by) {
  if (s.start > after) {
    s.start = static_cast<std::size_t>(static_cast<long>(s.start) + by);
    s.end = static_cast<std::size_t>(static_cast<long>(s.end) + by);
  }
  return s;
}

}  // namespace

std::vector<ConceptAssertion> ReadConceptNet(const std::string &path,
                                             GenReport *report) {
  auto in = OpenIn(path);
  std::vector<ConceptAssertion> out;
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = StripCr(line);
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (f.size() != 5) {
      throw FormatError(path + ":" + std::to_string(n) + ": expected 5 fields");
    }
    report->Add("cerp.rows");
    if (f[2].rfind("/c/en/", 0) != 0 || f[3].rfind("/c/en/", 0) != 0) {
      report->Add("cerp.dropped_non_english");
      continue;
    }
    if (ExcludedRelation(f[1])) {
      report->Add("cerp.dropped_relation");
      continue;
    }
    json info;
    try {
      info = json::parse(f[4]);
    } catch (const json::exception &e) {
      throw FormatError(path + ":" + std::to_string(n) + ": " + e.what());
    }
    if (!info.contains("surfaceText") || !info["surfaceText"].is_string()) {
      report->Add("cerp.dropped_no_surface_text");
      continue;
    }
    const std::string surface = info["surfaceText"].get<std::string>();
    if (Lowercase(surface).find("likely to find") != std::string::npos) {
      report->Add("cerp.dropped_relation");
      continue;
    }
    ConceptAssertion a{f[0], f[1], {}, {}};
    if (!ParseSurface(surface, &a.tokens, &a.mentions)) {
      report->Add("cerp.dropped_malformed_surface");
      continue;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::map<std::string, NerAnnotation> ReadNer(const std::string &path) {
  std::map<std::string, NerAnnotation> out;
  ForEachJsonLine(path, [&](const json &j) {
    NerAnnotation a;
    for (const auto &s : j.at("spans")) a.spans.push_back(GetSpan(s));
    a.types = j.at("types").get<std::vector<std::string>>();
    if (a.types.size() != a.spans.size()) {
      throw std::invalid_argument("spans and types differ in length");
    }
    out[j.at("instance_id").get<std::string>()] = std::move(a);
  });
  return out;
}

bool IsRelationVerb(const std::string &token) {
  static const std::set<std::string> kVerbs = {
      "is",   "are",   "was",  "were",   "am",   "can",  "could",
      "will", "would", "should", "may",  "might", "must", "has",
      "have", "had",   "does", "do",     "did"};
  return kVerbs.count(token) > 0;
}

bool CerpVariants(const ConceptAssertion &assertion, int a,
                  const std::vector<std::string> &replacement,
                  std::array<PairInstance, 4> *out) {
  const auto &m = assertion.mentions;
  std::size_t verb = assertion.tokens.size();
  for (std::size_t i = 0; i < assertion.tokens.size(); ++i) {
    if (Inside(i, m[0]) || Inside(i, m[1])) continue;
    if (IsRelationVerb(assertion.tokens[i])) {
      verb = i;
      break;
    }
  }
  if (verb == assertion.tokens.size()) return false;

  struct Sentence {
    std::vector<std::string> tokens;
    std::array<Span, 2> spans;
    std::size_t verb;
  };
  auto negate = [](Sentence s) {
    s.tokens.insert(s.tokens.begin() + s.verb + 1, "not");
    for (auto &sp : s.spans) sp = Shifted(sp, s.verb, 1);
    return s;
  };
  const Sentence original{assertion.tokens, m, verb};
  Sentence swapped = original;
  const long by = Splice(&swapped.tokens, m[a], replacement);
  swapped.spans[a].end = static_cast<std::size_t>(
      static_cast<long>(swapped.spans[a].end) + by);
  swapped.spans[1 - a] = Shifted(swapped.spans[1 - a], m[a].end, by);
  if (verb > m[a].end) {
    swapped.verb = static_cast<std::size_t>(static_cast<long>(verb) + by);
  }

  const Sentence variants[4] = {original, swapped, negate(original),
                                negate(swapped)};
  const char *suffix[4] = {"orig", "swap", "neg", "swap_neg"};
  const int label[4] = {1, 0, 0, 1};
  for (int v = 0; v < 4; ++v) {
    PairInstance &p = (*out)[v];
    p.id = assertion.uri + "#" + suffix[v];
    p.label = label[v];
    p.group.reset();
    p.left = {PairEmbeddingId(p.id, 1), variants[v].tokens,
              variants[v].spans[0]};
    p.right = {PairEmbeddingId(p.id, 2), variants[v].tokens,
               variants[v].spans[1]};
  }
  return true;
}

SplitRows<PairInstance> GenCerp(
    const std::vector<ConceptAssertion> &assertions,
    const std::map<std::string, NerAnnotation> &ner,
    const WordVectorTable &wordvec, const SplitSpec &spec, GenReport *report) {
  // Replaceable entity: the first argument that is an NER span of a
  // non-numeric type.
  struct Kept {
    const ConceptAssertion *assertion;
    int arg;
    std::string entity;
  };
  std::vector<Kept> kept;
  for (const auto &a : assertions) {
    const auto it = ner.find(a.uri);
    if (it == ner.end()) {
      report->Add("cerp.dropped_no_ner");
      continue;
    }
    int arg = -1;
    for (int m = 0; m < 2 && arg < 0; ++m) {
      for (std::size_t k = 0; k < it->second.spans.size(); ++k) {
        if (it->second.spans[k] == a.mentions[m] &&
            !IsNumericType(it->second.types[k])) {
          arg = m;
          break;
        }
      }
    }
    if (arg < 0) {
      report->Add("cerp.dropped_no_entity");
      continue;
    }
    const auto span = std::span<const std::string>(a.tokens).subspan(
        a.mentions[arg].start, a.mentions[arg].size());
    kept.push_back({&a, arg, Join(span)});
  }
  report->Add("cerp.assertions", static_cast<long>(kept.size()));

  // Entity vocabulary with unit-norm averaged word vectors.
  std::map<std::string, std::size_t> entity_index;
  for (const auto &k : kept) entity_index.emplace(k.entity, 0);
  std::vector<std::string> entities;
  std::vector<Eigen::VectorXd> vectors;
  for (auto &[name, index] : entity_index) {
    const auto v = MeanVector(wordvec, Tokenize(name));
    if (!v) {
      index = SIZE_MAX;
      continue;
    }
    index = entities.size();
    entities.push_back(name);
    vectors.push_back(v->normalized());
  }
  Eigen::MatrixXd unit(wordvec.dim, entities.size());
  for (std::size_t e = 0; e < entities.size(); ++e) unit.col(e) = vectors[e];

  std::map<std::size_t, std::size_t> nearest;
  auto nearest_of = [&](std::size_t e) -> std::size_t {
    auto it = nearest.find(e);
    if (it != nearest.end()) return it->second;
    const Eigen::VectorXd sims = unit.transpose() * unit.col(e);
    std::size_t best = SIZE_MAX;
    for (std::size_t c = 0; c < entities.size(); ++c) {
      if (c == e) continue;
      if (best == SIZE_MAX || sims[c] > sims[best]) best = c;
    }
    nearest[e] = best;
    return best;
  };

  std::vector<PairInstance> positives, negatives;
  for (const auto &k : kept) {
    const std::size_t e = entity_index.at(k.entity);
    if (e == SIZE_MAX) {
      report->Add("cerp.dropped_oov_entity");
      continue;
    }
    const std::size_t c = nearest_of(e);
    if (c == SIZE_MAX) {
      report->Add("cerp.dropped_no_replacement");
      continue;
    }
    std::array<PairInstance, 4> v;
    if (!CerpVariants(*k.assertion, k.arg, Tokenize(entities[c]), &v)) {
      report->Add("cerp.dropped_no_relation_verb");
      continue;
    }
    positives.push_back(v[0]);
    negatives.push_back(v[1]);
    negatives.push_back(v[2]);
    positives.push_back(v[3]);
  }
  report->Add("cerp.positives", static_cast<long>(positives.size()));
  report->Add("cerp.negatives", static_cast<long>(negatives.size()));

  SeededRng rng(spec.seed);
  const std::size_t per_class = std::min(
      {positives.size(), negatives.size(), spec.cerp_per_class});
  const SplitSizes halves = {spec.cerp[0] / 2, spec.cerp[1] / 2,
                             spec.cerp[2] / 2};
  const SplitSizes sizes = AllocateSplits(per_class, halves);
  if (sizes != halves) {
    report->Warn("cerp: only " + std::to_string(per_class) +
                 " instances per class available; splits scaled down");
  }
  std::array<std::vector<std::size_t>, 2> picks;
  const std::vector<PairInstance> *classes[2] = {&positives, &negatives};
  for (int c = 0; c < 2; ++c) {
    picks[c].resize(classes[c]->size());
    std::iota(picks[c].begin(), picks[c].end(), std::size_t{0});
    rng.Shuffle(&picks[c]);
  }
  SplitRows<PairInstance> out;
  std::size_t at = 0;
  for (int s = 0; s < 3; ++s) {
    std::vector<std::pair<std::size_t, const PairInstance *>> rows;
    for (int c = 0; c < 2; ++c) {
      for (std::size_t r = at; r < at + sizes[s]; ++r) {
        const std::size_t k = picks[c][r];
        // Two instances per assertion in each class, restored to the
        // original, swap, neg, swap_neg order.
        static constexpr std::size_t kRank[2][2] = {{0, 3}, {1, 2}};
        rows.push_back({(k / 2) * 4 + kRank[c][k % 2], &(*classes[c])[k]});
      }
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto &x, const auto &y) { return x.first < y.first; });
    for (const auto &r : rows) out[s].push_back(*r.second);
    at += sizes[s];
  }
  return out;
}

// ---------------------------------------------------------------- EFP

std::vector<FeverClaim> ReadFever(const std::string &path) {
  std::vector<FeverClaim> out;
  ForEachJsonLine(path, [&](const json &j) {
    FeverClaim c;
    c.id = GetId(j.at("id"));
    c.label = j.at("label").get<std::string>();
    c.tokens = Tokenize(j.at("claim").get<std::string>());
    if (j.contains("mentions")) {
      for (const auto &m : j.at("mentions")) {
        const Span s = GetSpan(m);
        if (s.end >= c.tokens.size()) {
          throw std::invalid_argument("claim " + c.id +
                                      ": mention outside the claim");
        }
        c.mentions.push_back(s);
      }
    }
    out.push_back(std::move(c));
  });
  return out;
}

SplitRows<MentionRecord> GenEfp(const std::vector<FeverClaim> &claims,
                                const SplitSpec &spec, GenReport *report) {
  SeededRng rng(spec.seed);
  std::vector<MentionRecord> pool;
  for (const auto &c : claims) {
    int label;
    if (c.label == "SUPPORTS") {
      label = 1;
    } else if (c.label == "REFUTES") {
      label = 0;
    } else {
      report->Add("efp.dropped_not_enough_info");
      continue;
    }
    if (c.mentions.empty()) {
      report->Add("efp.dropped_no_mention");
      continue;
    }
    const Span s = c.mentions.size() == 1
                       ? c.mentions[0]
                       : c.mentions[rng.Below(c.mentions.size())];
    pool.push_back({{c.id, c.tokens, s}, label});
  }
  report->Add("efp.pool", static_cast<long>(pool.size()));
  return Pick(pool, SampleSplits(pool.size(), spec.efp, &rng, "efp", report));
}

// ---------------------------------------------------------------- ET

std::vector<std::string> ReadTypeVocab(const std::string &path) {
  auto in = OpenIn(path);
  std::vector<std::string> types;
  std::string line;
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (!line.empty()) types.push_back(line);
  }
  if (types.empty()) throw DataError(path + ": empty type vocabulary");
  if (types.size() > static_cast<std::size_t>(kNumEntityTypes)) {
    throw DataError(path + ": more than " + std::to_string(kNumEntityTypes) +
                    " types");
  }
  return types;
}

std::vector<TypedInstance> ReadUltraFine(const std::string &path,
                                         const std::vector<std::string> &types,
                                         GenReport *report) {
  std::unordered_map<std::string, int> index;
  for (std::size_t t = 0; t < types.size(); ++t) {
    index.emplace(types[t], static_cast<int>(t));
  }
  std::vector<TypedInstance> out;
  ForEachJsonLine(path, [&](const json &j) {
    TypedInstance r;
    r.mention.instance_id = GetId(j.at("annot_id"));
    auto left = Lowered(j.at("left_context_token").get<std::vector<std::string>>());
    auto mention = Tokenize(j.at("mention_span").get<std::string>());
    auto right =
        Lowered(j.at("right_context_token").get<std::vector<std::string>>());
    if (mention.empty()) {
      report->Add("et.dropped_empty_mention");
      return;
    }
    r.mention.span = {left.size(), left.size() + mention.size() - 1};
    r.mention.tokens = std::move(left);
    r.mention.tokens.insert(r.mention.tokens.end(), mention.begin(),
                            mention.end());
    r.mention.tokens.insert(r.mention.tokens.end(), right.begin(), right.end());
    for (const auto &name : j.at("y_str").get<std::vector<std::string>>()) {
      const auto it = index.find(name);
      if (it == index.end()) {
        throw DataError(path + ": instance " + r.mention.instance_id +
                        " has unknown type " + name);
      }
      r.gold_types.insert(it->second);
    }
    r.Validate();
    out.push_back(std::move(r));
  });
  return out;
}

// ---------------------------------------------------------------- ERT

std::vector<KbTuple> ReadKbTuples(const std::string &path) {
  auto in = OpenIn(path);
  std::vector<KbTuple> out;
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = StripCr(line);
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty()) {
      throw FormatError(path + ":" + std::to_string(n) +
                        ": expected entity1, relation, entity2");
    }
    out.push_back({f[0], f[1], f[2]});
  }
  return out;
}

namespace {

Eigen::VectorXd NameFeature(const WordVectorTable &wordvec,
                            const EntityDescription &e1,
                            const EntityDescription &e2) {
  const auto v1 = AverageWordVectors(wordvec, Tokenize(e1.title));
  const auto v2 = AverageWordVectors(wordvec, Tokenize(e2.title));
  return MakePairFeature(v1, v2).cast<double>();
}

}  // namespace

SplitRows<RelationRecord> GenErt(
    const std::vector<KbTuple> &tuples,
    const std::map<std::string, EntityDescription> &descriptions,
    const WordVectorTable &wordvec, const SplitSpec &spec, GenReport *report) {
  std::map<std::string, std::vector<const KbTuple *>> by_relation;
  for (const auto &t : tuples) {
    if (!descriptions.count(t.entity1) || !descriptions.count(t.entity2)) {
      report->Add("ert.dropped_no_description");
      continue;
    }
    by_relation[t.relation].push_back(&t);
  }
  const auto &per = spec.ert_per_relation;
  const std::size_t need =
      std::max(spec.ert_min_tuples, per[0] + per[1] + per[2]);

  // Per-relation sample, in relation name order.
  SeededRng rng(spec.seed);
  std::vector<std::string> relations;
  std::vector<std::array<std::vector<const KbTuple *>, 3>> samples;
  for (auto &[rel, list] : by_relation) {
    if (list.size() < need) {
      report->Warn("ert: relation " + rel + " has " +
                   std::to_string(list.size()) + " tuples; excluded");
      report->Add("ert.excluded_small_relations");
      continue;
    }
    std::vector<std::size_t> order(list.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.Shuffle(&order);
    std::array<std::vector<const KbTuple *>, 3> s;
    std::size_t at = 0;
    for (int k = 0; k < 3; ++k) {
      std::vector<std::size_t> idx(order.begin() + at,
                                   order.begin() + at + per[k]);
      std::sort(idx.begin(), idx.end());
      for (std::size_t i : idx) s[k].push_back(list[i]);
      at += per[k];
    }
    relations.push_back(rel);
    samples.push_back(std::move(s));
  }
  report->Add("ert.candidate_relations", static_cast<long>(relations.size()));

  // Drop the relations a name-only probe finds easiest.
  std::vector<bool> keep(relations.size(), true);
  if (relations.size() > spec.ert_relations) {
    const auto n_rel = static_cast<Eigen::Index>(relations.size());
    auto features = [&](int split, std::vector<int> *labels) {
      std::vector<Eigen::VectorXd> cols;
      for (std::size_t r = 0; r < relations.size(); ++r) {
        for (const KbTuple *t : samples[r][split]) {
          cols.push_back(NameFeature(wordvec, descriptions.at(t->entity1),
                                     descriptions.at(t->entity2)));
          labels->push_back(static_cast<int>(r));
        }
      }
      Eigen::MatrixXd m(cols.front().size(), cols.size());
      for (std::size_t c = 0; c < cols.size(); ++c) m.col(c) = cols[c];
      return m;
    };
    std::vector<int> train_labels, dev_labels;
    const Eigen::MatrixXd train = features(0, &train_labels);
    const Eigen::MatrixXd dev = features(1, &dev_labels);
    TrainConfig cfg;
    cfg.seed = spec.seed;
    const TrainResult fit =
        TrainLinear(train, train_labels, ProbeLoss::kCrossEntropy, n_rel, cfg);
    const Eigen::MatrixXd logits = fit.model.Logits(dev);
    std::vector<double> hits(relations.size(), 0.0);
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      Eigen::Index best;
      logits.col(c).maxCoeff(&best);
      if (best == dev_labels[c]) hits[dev_labels[c]] += 1.0;
    }
    std::vector<std::size_t> rank(relations.size());
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) {
                       return hits[a] > hits[b];
                     });
    for (std::size_t k = 0; k < relations.size() - spec.ert_relations; ++k) {
      keep[rank[k]] = false;
      report->Add("ert.dropped_easy_relations");
    }
  } else if (relations.size() < spec.ert_relations) {
    report->Warn("ert: only " + std::to_string(relations.size()) +
                 " relations qualify; target is " +
                 std::to_string(spec.ert_relations));
  }

  SplitRows<RelationRecord> out;
  int label = 0;
  for (std::size_t r = 0; r < relations.size(); ++r) {
    if (!keep[r]) continue;
    for (int s = 0; s < 3; ++s) {
      int k = 0;
      for (const KbTuple *t : samples[r][s]) {
        out[s].push_back({relations[r] + "/" + kSplits[s] + "/" +
                              std::to_string(k++),
                          t->entity1, t->entity2, label, relations[r]});
      }
    }
    ++label;
  }
  report->Add("ert.relations", label);
  return out;
}

// ---------------------------------------------------------------- ESR

std::vector<ScoredNamePair> ReadKore(const std::string &path) {
  auto in = OpenIn(path);
  std::vector<ScoredNamePair> out;
  std::string seed;
  std::vector<std::string> candidates;
  auto flush = [&] {
    const double n = static_cast<double>(candidates.size());
    for (std::size_t r = 0; r < candidates.size(); ++r) {
      out.push_back({seed, candidates[r], n - static_cast<double>(r)});
    }
    candidates.clear();
  };
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = StripCr(line);
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (first == 0) {
      flush();
      seed = line;
    } else {
      if (seed.empty()) {
        throw FormatError(path + ":" + std::to_string(n) +
                          ": candidate before any seed entity");
      }
      candidates.push_back(line.substr(first));
    }
  }
  flush();
  return out;
}

std::vector<ScoredNamePair> ReadWikiSrs(const std::string &path) {
  auto in = OpenIn(path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  const auto header = SplitTabs(StripCr(line));
  auto column = [&](const std::string &name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw FormatError(path + ": header lacks column " + name);
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c1 = column("Term1"), c2 = column("Term2"),
                    cm = column("Mean");
  std::vector<ScoredNamePair> out;
  long n = 1;
  while (std::getline(in, line)) {
    ++n;
    line = StripCr(line);
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (f.size() < header.size()) {
      throw FormatError(path + ":" + std::to_string(n) + ": short row");
    }
    try {
      out.push_back({f[c1], f[c2], std::stod(f[cm])});
    } catch (const std::logic_error &) {
      throw FormatError(path + ":" + std::to_string(n) + ": bad score " +
                        f[cm]);
    }
  }
  return out;
}

std::vector<SimilarityRecord> GenEsr(
    const std::map<std::string, std::vector<ScoredNamePair>> &subsets,
    const std::map<std::string, EntityDescription> &descriptions,
    const std::map<std::string, std::string> &alignment) {
  std::unordered_map<std::string, std::string> by_title;
  for (const auto &[id, d] : descriptions) {
    by_title.emplace(NormalizeTitle(d.title), id);
  }
  std::set<std::string> unresolved;
  auto resolve = [&](const std::string &name) -> std::string {
    const auto a = alignment.find(name);
    if (a != alignment.end() && descriptions.count(a->second)) {
      return a->second;
    }
    const auto t = by_title.find(NormalizeTitle(name));
    if (t != by_title.end()) return t->second;
    unresolved.insert(name);
    return {};
  };
  std::vector<SimilarityRecord> out;
  for (const auto &[subset, pairs] : subsets) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      out.push_back({subset + "/" + std::to_string(k), subset,
                     resolve(pairs[k].name1), resolve(pairs[k].name2),
                     pairs[k].score});
    }
  }
  if (!unresolved.empty()) {
    std::string names;
    for (const auto &n : unresolved) names += "\n  " + n;
    throw DataError("esr: " + std::to_string(unresolved.size()) +
                    " entities have no description; add them to the "
                    "alignment file:" +
                    names);
  }
  return out;
}

// ---------------------------------------------------------------- CoNLL

std::vector<NedMention> ReadNedMentions(const std::string &path) {
  std::vector<NedMention> out;
  ForEachJsonLine(path, [&](const json &j) {
    NedMention m;
    m.split = j.at("split").get<std::string>();
    if (m.split == "testa") m.split = "dev";
    if (m.split == "testb") m.split = "test";
    if (m.split != "train" && m.split != "dev" && m.split != "test") {
      throw std::invalid_argument("unknown split " + m.split);
    }
    m.mention.instance_id = GetId(j.at("id"));
    m.mention.tokens = Lowered(j.at("context").get<std::vector<std::string>>());
    m.mention.span = GetSpan(j.at("span"));
    m.mention.Validate();
    m.gold = j.at("gold").is_null() ? "" : j.at("gold").get<std::string>();
    out.push_back(std::move(m));
  });
  return out;
}

CrossWikis ReadCrossWikis(const std::string &path) {
  auto in = OpenIn(path);
  CrossWikis out;
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = StripCr(line);
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    std::istringstream rest(tab == std::string::npos ? "" : line.substr(tab + 1));
    LinkCandidate c;
    if (!(rest >> c.prior >> c.entity_id) || c.prior < 0.0 || c.prior > 1.0) {
      throw FormatError(path + ":" + std::to_string(n) +
                        ": expected mention \\t prior entity_id");
    }
    out[Join(Tokenize(line.substr(0, tab)))].push_back(std::move(c));
  }
  return out;
}

std::vector<LinkCandidate> BuildCandidates(
    const std::vector<LinkCandidate> &entries, const std::string &gold,
    const std::map<std::string, EntityDescription> &descriptions,
    std::size_t max_candidates) {
  if (max_candidates == 0) throw std::invalid_argument("no candidate slots");
  if (!descriptions.count(gold)) {
    throw DataError("gold entity " + gold + " has no description");
  }
  // Best prior per describable entity.
  std::map<std::string, double> best;
  for (const auto &e : entries) {
    if (!descriptions.count(e.entity_id)) continue;
    auto [it, fresh] = best.emplace(e.entity_id, e.prior);
    if (!fresh) it->second = std::max(it->second, e.prior);
  }
  std::vector<LinkCandidate> c;
  for (const auto &[id, p] : best) c.push_back({id, p});
  std::stable_sort(c.begin(), c.end(),
                   [](const LinkCandidate &a, const LinkCandidate &b) {
                     return a.prior > b.prior;
                   });
  if (c.size() > max_candidates) c.resize(max_candidates);
  const bool has_gold =
      std::any_of(c.begin(), c.end(),
                  [&](const LinkCandidate &x) { return x.entity_id == gold; });
  if (!has_gold) {
    if (c.size() == max_candidates) c.pop_back();
    const auto it = best.find(gold);
    c.push_back({gold, it != best.end() ? it->second : 1e-6});
  }
  double total = 0.0;
  for (const auto &x : c) total += x.prior;
  for (auto &x : c) {
    x.prior = total > 0.0 ? x.prior / total : 1.0 / static_cast<double>(c.size());
  }
  return c;
}

SplitRows<LinkingRecord> GenConll(
    const std::vector<NedMention> &mentions, const CrossWikis &crosswikis,
    const std::map<std::string, EntityDescription> &descriptions,
    const SplitSpec &spec, GenReport *report) {
  SplitRows<LinkingRecord> out;
  static const std::vector<LinkCandidate> kNone;
  for (const auto &m : mentions) {
    if (m.gold.empty() || m.gold == "--NME--") {
      report->Add("conll.dropped_nil");
      continue;
    }
    const auto it = crosswikis.find(Join(m.mention.MentionTokens()));
    if (it == crosswikis.end()) report->Add("conll.no_crosswikis_entry");
    LinkingRecord r;
    r.mention = m.mention;
    r.gold = m.gold;
    try {
      r.candidates =
          BuildCandidates(it == crosswikis.end() ? kNone : it->second, m.gold,
                          descriptions, spec.conll_candidates);
    } catch (const DataError &e) {
      throw DataError("conll: mention " + m.mention.instance_id + ": " +
                      e.what());
    }
    const int s = static_cast<int>(
        std::find_if(std::begin(kSplits), std::end(kSplits),
                     [&](const char *x) { return m.split == x; }) -
        std::begin(kSplits));
    out[s].push_back(std::move(r));
    report->Add("conll.mentions");
  }
  return out;
}

// ---------------------------------------------------------------- Rare

std::vector<RareDocument> ReadRare(const std::string &path) {
  std::vector<RareDocument> out;
  ForEachJsonLine(path, [&](const json &j) {
    out.push_back({GetId(j.at("id")),
                   Lowered(j.at("context").get<std::vector<std::string>>()),
                   j.at("candidates").get<std::vector<std::string>>(),
                   j.at("gold").get<std::string>()});
  });
  return out;
}

SplitRows<LinkingRecord> GenRare(
    const std::vector<RareDocument> &docs,
    const std::map<std::string, EntityDescription> &descriptions,
    const SplitSpec &spec, GenReport *report) {
  std::vector<LinkingRecord> pool;
  for (const auto &d : docs) {
    if (d.candidates.size() != 4) {
      report->Add("rare.dropped_candidate_count");
      continue;
    }
    const auto blanks = std::count(d.tokens.begin(), d.tokens.end(),
                                   std::string(kBlankToken));
    if (blanks != 1) {
      report->Add("rare.dropped_blank_count");
      continue;
    }
    if (std::find(d.candidates.begin(), d.candidates.end(), d.gold) ==
        d.candidates.end()) {
      report->Add("rare.dropped_gold_missing");
      continue;
    }
    if (!std::all_of(d.candidates.begin(), d.candidates.end(),
                     [&](const std::string &c) {
                       return descriptions.count(c) > 0;
                     })) {
      report->Add("rare.dropped_no_description");
      continue;
    }
    const std::size_t b = static_cast<std::size_t>(
        std::find(d.tokens.begin(), d.tokens.end(), kBlankToken) -
        d.tokens.begin());
    LinkingRecord r;
    r.mention = {d.id, d.tokens, {b, b}};
    for (const auto &c : d.candidates) r.candidates.push_back({c, 0.25});
    r.gold = d.gold;
    pool.push_back(std::move(r));
  }
  report->Add("rare.pool", static_cast<long>(pool.size()));
  SeededRng rng(spec.seed);
  return Pick(pool, SampleSplits(pool.size(), spec.rare, &rng, "rare", report));
}

// ---------------------------------------------------------------- driver

namespace {

std::map<std::string, EntityDescription> Referenced(
    const std::map<std::string, EntityDescription> &store,
    const std::set<std::string> &ids) {
  std::map<std::string, EntityDescription> out;
  for (const auto &id : ids) out.emplace(id, store.at(id));
  return out;
}

const WordVectorTable &Need(const WordVectorTable *wordvec, Task task) {
  if (wordvec == nullptr) {
    throw std::invalid_argument(std::string("datagen ") + TaskName(task) +
                                " needs word vectors");
  }
  return *wordvec;
}

template <typename Row, typename Writer>
void WriteSplits(const SplitRows<Row> &rows, const std::string &dir,
                 Writer write, GenReport *report, const std::string &task) {
  for (int s = 0; s < 3; ++s) {
    write(rows[s], SplitPath(dir, kSplits[s]));
    report->Add(task + "." + kSplits[s], static_cast<long>(rows[s].size()));
  }
}

void CheckDisjoint(const std::array<std::vector<std::string>, 3> &ids,
                   const std::string &task) {
  std::set<std::string> seen;
  for (const auto &split : ids) {
    for (const auto &id : split) {
      if (!seen.insert(id).second) {
        throw DataError(task + ": id " + id + " appears twice");
      }
    }
  }
}

template <typename Row, typename IdOf>
void CheckDisjoint(const SplitRows<Row> &rows, IdOf id_of,
                   const std::string &task) {
  std::array<std::vector<std::string>, 3> ids;
  for (int s = 0; s < 3; ++s) {
    for (const auto &r : rows[s]) ids[s].push_back(id_of(r));
  }
  CheckDisjoint(ids, task);
}

std::map<std::string, std::string> ReadAlignment(const std::string &path) {
  std::map<std::string, std::string> out;
  if (!fs::exists(path)) return out;
  auto in = OpenIn(path);
  std::string line;
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (f.size() != 2) throw FormatError(path + ": expected name \\t id");
    out[f[0]] = f[1];
  }
  return out;
}

}  // namespace

GenReport RunDatagen(Task task, const std::string &source_dir,
                     const WordVectorTable *wordvec, const SplitSpec &spec,
                     const std::string &out_dir) {
  GenReport report;
  fs::create_directories(out_dir);
  const std::string name = TaskName(task);
  auto src = [&](const std::string &file) { return source_dir + "/" + file; };
  auto descriptions = [&] {
    return ReadDescriptionStore(src("descriptions.jsonl"));
  };
  const auto pair_id = [](const PairInstance &p) { return p.id; };
  const auto link_id = [](const LinkingRecord &r) {
    return r.mention.instance_id;
  };
  switch (task) {
    case Task::kCap: {
      std::vector<CorefDocument> docs;
      for (const char *split : kSplits) {
        const std::string path = src(std::string(split) + ".jsonl");
        if (!fs::exists(path)) continue;
        for (auto &d : ReadCorefDocuments(path)) docs.push_back(std::move(d));
      }
      if (docs.empty()) throw DataError("cap: no PreCo files in " + source_dir);
      const auto rows = GenCap(docs, Need(wordvec, task), spec, &report);
      CheckDisjoint(rows, pair_id, name);
      WriteSplits(rows, out_dir, WritePairs, &report, name);
      break;
    }
    case Task::kCerp: {
      const auto assertions = ReadConceptNet(src("assertions.csv"), &report);
      const auto rows = GenCerp(assertions, ReadNer(src("ner.jsonl")),
                                Need(wordvec, task), spec, &report);
      CheckDisjoint(rows, pair_id, name);
      WriteSplits(rows, out_dir, WritePairs, &report, name);
      break;
    }
    case Task::kEfp: {
      const auto rows = GenEfp(ReadFever(src("claims.jsonl")), spec, &report);
      CheckDisjoint(
          rows, [](const MentionRecord &r) { return r.mention.instance_id; },
          name);
      WriteSplits(rows, out_dir, WriteMentions, &report, name);
      break;
    }
    case Task::kEt: {
      const auto types = ReadTypeVocab(src("types.txt"));
      SplitRows<TypedInstance> rows;
      for (int s = 0; s < 3; ++s) {
        rows[s] = ReadUltraFine(src(std::string(kSplits[s]) + ".json"), types,
                                &report);
      }
      CheckDisjoint(
          rows, [](const TypedInstance &r) { return r.mention.instance_id; },
          name);
      WriteSplits(rows, out_dir, WriteTyped, &report, name);
      std::ofstream out(out_dir + "/types.txt", std::ios::binary);
      for (const auto &t : types) out << t << '\n';
      break;
    }
    case Task::kErt: {
      const auto store = descriptions();
      const auto rows = GenErt(ReadKbTuples(src("tuples.tsv")), store,
                               Need(wordvec, task), spec, &report);
      CheckDisjoint(rows, [](const RelationRecord &r) { return r.id; }, name);
      WriteSplits(rows, out_dir, WriteRelations, &report, name);
      std::set<std::string> ids;
      for (const auto &split : rows) {
        for (const auto &r : split) ids.insert({r.entity1, r.entity2});
      }
      WriteDescriptionStore(Referenced(store, ids),
                            out_dir + "/descriptions.jsonl");
      break;
    }
    case Task::kEsr: {
      const auto store = descriptions();
      std::map<std::string, std::vector<ScoredNamePair>> subsets;
      subsets["kore"] = ReadKore(src("kore.txt"));
      subsets["wikisrs_rel"] = ReadWikiSrs(src("wikisrs_rel.tsv"));
      subsets["wikisrs_sim"] = ReadWikiSrs(src("wikisrs_sim.tsv"));
      const auto rows =
          GenEsr(subsets, store, ReadAlignment(src("alignment.tsv")));
      WriteSimilarity(rows, SplitPath(out_dir, "test"));
      std::set<std::string> ids;
      for (const auto &r : rows) {
        ids.insert({r.entity1, r.entity2});
        report.Add("esr." + r.subset);
      }
      report.Add("esr.test", static_cast<long>(rows.size()));
      WriteDescriptionStore(Referenced(store, ids),
                            out_dir + "/descriptions.jsonl");
      break;
    }
    case Task::kConll:
    case Task::kRare: {
      const auto store = descriptions();
      const auto rows =
          task == Task::kConll
              ? GenConll(ReadNedMentions(src("mentions.jsonl")),
                         ReadCrossWikis(src("crosswikis.tsv")), store, spec,
                         &report)
              : GenRare(ReadRare(src("instances.jsonl")), store, spec,
                        &report);
      CheckDisjoint(rows, link_id, name);
      WriteSplits(rows, out_dir, WriteLinking, &report, name);
      std::set<std::string> ids;
      for (const auto &split : rows) {
        for (const auto &r : split) {
          for (const auto &c : r.candidates) ids.insert(c.entity_id);
        }
      }
      WriteDescriptionStore(Referenced(store, ids),
                            out_dir + "/descriptions.jsonl");
      break;
    }
  }
  return report;
}

}  // namespace enteval
