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

// Task dataset construction from raw source corpora.
//
// Every generator is a deterministic function of its parsed sources and the
// seed. Sampling uses SeededRng, whose draws depend only on the 64-bit
// Mersenne Twister output stream and are therefore identical across
// standard libraries.
//
// Source files expected by RunDatagen under the task's source directory:
//
//   cap    train.jsonl dev.jsonl test.jsonl (any present; PreCo documents
//          {"id","sentences":[[tok..]..],"mention_clusters":[[[s,b,e)..]..]})
//   cerp   assertions.csv (ConceptNet: uri, rel, start, end, json info with
//          "surfaceText" "[[a]] ... [[b]]"), ner.jsonl
//          {"instance_id": uri, "spans":[[i,j]..], "types":[..]}
//   efp    claims.jsonl {"id","label","claim","mentions":[[i,j]..]}
//   et     train.json dev.json test.json {"annot_id","left_context_token",
//          "mention_span","right_context_token","y_str"}, types.txt
//   ert    tuples.tsv (entity1 \t relation \t entity2), descriptions.jsonl
//   esr    kore.txt (seed line, then tab-indented candidates best first),
//          wikisrs_rel.tsv and wikisrs_sim.tsv (header with Term1, Term2,
//          Mean), descriptions.jsonl, optional alignment.tsv (name \t id)
//   conll  mentions.jsonl {"id","split","context","span","gold"},
//          crosswikis.tsv (mention \t prior entity_id), descriptions.jsonl
//   rare   instances.jsonl {"id","context","candidates","gold"} with one
//          "**blank**" context token, descriptions.jsonl
//
// Token spans in every source are inclusive indices into the lower-cased
// Tokenize() sequence (PreCo's exclusive ends are converted on load).

#ifndef ENTEVAL_DATAGEN_H_
#define ENTEVAL_DATAGEN_H_

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "enteval/core.h"
#include "enteval/dataset.h"
#include "enteval/embed_io.h"

namespace enteval {

// Uniform draws from the raw mt19937_64 stream by rejection.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, n); n > 0.
  std::uint64_t Below(std::uint64_t n);

  template <typename T>
  void Shuffle(std::vector<T> *v) {
    for (std::size_t i = v->size(); i > 1; --i) {
      std::swap((*v)[i - 1], (*v)[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Train, dev and test counts.
using SplitSizes = std::array<std::size_t, 3>;

struct SplitSpec {
  std::uint64_t seed = 42;
  SplitSizes cap_same = {3982, 3806, 3938};
  SplitSizes cap_next = {3982, 3828, 3850};
  int cap_bins = 10;
  SplitSizes cerp = {4000, 4000, 4000};  // balanced within each split
  std::size_t cerp_per_class = 6000;
  SplitSizes efp = {10000, 2000, 2000};
  SplitSizes ert_per_relation = {5, 10, 10};
  std::size_t ert_relations = 626;
  std::size_t ert_min_tuples = 25;
  SplitSizes rare = {10000, 4000, 4000};
  std::size_t conll_candidates = 30;
};

// `targets` when `available` covers their sum; otherwise `available` split
// in proportion to `targets` by largest remainder (ties to the earlier
// split).
SplitSizes AllocateSplits(std::size_t available, const SplitSizes &targets);

// Named counters and warnings collected during generation.
struct GenReport {
  std::map<std::string, long> counts;
  std::vector<std::string> warnings;

  void Add(const std::string &key, long n = 1) { counts[key] += n; }
  void Warn(std::string message) { warnings.push_back(std::move(message)); }
};

// ---------------------------------------------------------------- CAP

struct CorefMention {
  std::size_t sentence = 0;
  Span span;
  int cluster = 0;
};

struct CorefDocument {
  std::string id;
  std::vector<std::vector<std::string>> sentences;
  std::vector<CorefMention> mentions;  // sorted by (sentence, start, end)
};

std::vector<CorefDocument> ReadCorefDocuments(const std::string &path);

// Single-token mentions found on this list are pronouns.
bool IsPronoun(const std::string &token);

// Candidate mention pairs of one document before filtering and sampling.
std::vector<PairInstance> CapCandidates(const CorefDocument &doc,
                                        GenReport *report);

SplitRows<PairInstance> GenCap(const std::vector<CorefDocument> &docs,
                               const WordVectorTable &wordvec,
                               const SplitSpec &spec, GenReport *report);

// ---------------------------------------------------------------- CERP

struct ConceptAssertion {
  std::string uri;
  std::string relation;
  std::vector<std::string> tokens;
  std::array<Span, 2> mentions;  // the two bracketed arguments
};

struct NerAnnotation {
  std::vector<Span> spans;
  std::vector<std::string> types;
};

// English rows with a surface text and an allowed relation.
std::vector<ConceptAssertion> ReadConceptNet(const std::string &path,
                                             GenReport *report);
std::map<std::string, NerAnnotation> ReadNer(const std::string &path);

// Verb after which rule-2 negation inserts "not".
bool IsRelationVerb(const std::string &token);

// Variants of one assertion with entity mention `a` (0 or 1) replaced by
// `replacement`: original, rule 1, rule 2, rule 3. Returns false when the
// template has no relation verb.
bool CerpVariants(const ConceptAssertion &assertion, int a,
                  const std::vector<std::string> &replacement,
                  std::array<PairInstance, 4> *out);

SplitRows<PairInstance> GenCerp(
    const std::vector<ConceptAssertion> &assertions,
    const std::map<std::string, NerAnnotation> &ner,
    const WordVectorTable &wordvec, const SplitSpec &spec, GenReport *report);

// ---------------------------------------------------------------- EFP

struct FeverClaim {
  std::string id;
  std::string label;
  std::vector<std::string> tokens;
  std::vector<Span> mentions;
};

std::vector<FeverClaim> ReadFever(const std::string &path);

SplitRows<MentionRecord> GenEfp(const std::vector<FeverClaim> &claims,
                                const SplitSpec &spec, GenReport *report);

// ---------------------------------------------------------------- ET

std::vector<std::string> ReadTypeVocab(const std::string &path);

std::vector<TypedInstance> ReadUltraFine(const std::string &path,
                                         const std::vector<std::string> &types,
                                         GenReport *report);

// ---------------------------------------------------------------- ERT

struct KbTuple {
  std::string entity1;
  std::string relation;
  std::string entity2;
};

std::vector<KbTuple> ReadKbTuples(const std::string &path);

SplitRows<RelationRecord> GenErt(
    const std::vector<KbTuple> &tuples,
    const std::map<std::string, EntityDescription> &descriptions,
    const WordVectorTable &wordvec, const SplitSpec &spec, GenReport *report);

// ---------------------------------------------------------------- ESR

struct ScoredNamePair {
  std::string name1;
  std::string name2;
  double score = 0.0;
};

// KORE rank r of n candidates scores n + 1 - r (20..1 for 20 candidates).
std::vector<ScoredNamePair> ReadKore(const std::string &path);
std::vector<ScoredNamePair> ReadWikiSrs(const std::string &path);

// Resolves names through `alignment` first, then by title. Throws
// DataError listing every unresolved name.
std::vector<SimilarityRecord> GenEsr(
    const std::map<std::string, std::vector<ScoredNamePair>> &subsets,
    const std::map<std::string, EntityDescription> &descriptions,
    const std::map<std::string, std::string> &alignment);

// ---------------------------------------------------------------- CoNLL

struct NedMention {
  std::string split;  // train, dev, test
  MentionContext mention;
  std::string gold;
};

using CrossWikis = std::map<std::string, std::vector<LinkCandidate>>;

std::vector<NedMention> ReadNedMentions(const std::string &path);
CrossWikis ReadCrossWikis(const std::string &path);

// Candidates for one mention: describable entries ranked by prior (then
// entity id), cut to `max_candidates`, the gold forced in with prior 1e-6
// when missing, priors normalized.
std::vector<LinkCandidate> BuildCandidates(
    const std::vector<LinkCandidate> &entries, const std::string &gold,
    const std::map<std::string, EntityDescription> &descriptions,
    std::size_t max_candidates);

SplitRows<LinkingRecord> GenConll(
    const std::vector<NedMention> &mentions, const CrossWikis &crosswikis,
    const std::map<std::string, EntityDescription> &descriptions,
    const SplitSpec &spec, GenReport *report);

// ---------------------------------------------------------------- Rare

struct RareDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> candidates;
  std::string gold;
};

std::vector<RareDocument> ReadRare(const std::string &path);

SplitRows<LinkingRecord> GenRare(
    const std::vector<RareDocument> &docs,
    const std::map<std::string, EntityDescription> &descriptions,
    const SplitSpec &spec, GenReport *report);

// ---------------------------------------------------------------- driver

// Reads the task's sources from `source_dir`, generates, and writes
// <out_dir>/{train,dev,test}.jsonl plus descriptions.jsonl (tasks that use
// descriptions) and types.txt (ET). `wordvec` is required for cap, cerp
// and ert.
GenReport RunDatagen(Task task, const std::string &source_dir,
                     const WordVectorTable *wordvec, const SplitSpec &spec,
                     const std::string &out_dir);

}  // namespace enteval

#endif  // ENTEVAL_DATAGEN_H_
