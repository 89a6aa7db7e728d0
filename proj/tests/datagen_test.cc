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

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "datagen_fixture.h"
#include "doctest.h"
#include "enteval/datagen.h"
#include "enteval/dataset.h"
#include "enteval/embed_io.h"

using namespace enteval;
namespace fs = std::filesystem;
namespace fx = datagen_fixture;

namespace {

fs::path ScratchDir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("enteval_datagen_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const WordVectorTable &Vectors() {
  static const WordVectorTable table = LoadWordVectors(fx::WordVectors());
  return table;
}

GenReport Generate(Task task, const fs::path &out) {
  return RunDatagen(task, fx::SourceDir(task), &Vectors(), fx::FixtureSpec(),
                    out.string());
}

std::string Text(const MentionContext &m) {
  std::string s;
  for (const auto &t : m.tokens) s += (s.empty() ? "" : " ") + t;
  return s;
}

std::string MentionText(const MentionContext &m) {
  std::string s;
  for (const auto &t : m.MentionTokens()) s += (s.empty() ? "" : " ") + t;
  return s;
}

template <typename Row>
std::vector<Row> All(const SplitRows<Row> &rows) {
  std::vector<Row> out;
  for (const auto &s : rows) out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace

TEST_CASE("every generator reproduces its golden files byte for byte") {
  const bool regenerate = std::getenv("ENTEVAL_REGENERATE_GOLDEN") != nullptr;
  for (Task task : kAllTasks) {
    CAPTURE(TaskName(task));
    const fs::path out = ScratchDir(std::string("golden_") + TaskName(task));
    Generate(task, out);
    if (regenerate) {
      fs::remove_all(fx::GoldenDir(task));
      fs::create_directories(fx::GoldenDir(task));
      for (const auto &f : fx::Files(out.string())) {
        fs::copy_file(out / f, fs::path(fx::GoldenDir(task)) / f);
      }
    }
    const auto names = fx::Files(out.string());
    REQUIRE(names == fx::Files(fx::GoldenDir(task)));
    for (const auto &f : names) {
      CAPTURE(f);
      CHECK(fx::Slurp((out / f).string()) ==
            fx::Slurp(fx::GoldenDir(task) + "/" + f));
    }
  }
}

TEST_CASE("reruns are byte identical") {
  for (Task task : kAllTasks) {
    CAPTURE(TaskName(task));
    const fs::path a = ScratchDir(std::string("a_") + TaskName(task));
    const fs::path b = ScratchDir(std::string("b_") + TaskName(task));
    Generate(task, a);
    Generate(task, b);
    for (const auto &f : fx::Files(a.string())) {
      CHECK(fx::Slurp((a / f).string()) == fx::Slurp((b / f).string()));
    }
  }
}

TEST_CASE("a different seed changes the sample") {
  SplitSpec spec = fx::FixtureSpec();
  spec.seed = 7;
  GenReport r1, r2;
  const auto claims = ReadFever(fx::SourceDir(Task::kEfp) + "/claims.jsonl");
  const auto a = GenEfp(claims, fx::FixtureSpec(), &r1);
  const auto b = GenEfp(claims, spec, &r2);
  std::vector<std::string> ia, ib;
  for (const auto &r : a[0]) ia.push_back(r.mention.instance_id);
  for (const auto &r : b[0]) ib.push_back(r.mention.instance_id);
  CHECK(ia != ib);
}

TEST_CASE("no instance appears in two splits") {
  const fs::path out = ScratchDir("disjoint");
  for (Task task : kAllTasks) {
    if (task == Task::kEsr) continue;
    CAPTURE(TaskName(task));
    const fs::path dir = out / TaskName(task);
    Generate(task, dir);
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const char *split : kSplits) {
      const auto path = SplitPath(dir.string(), split);
      std::ifstream in(path);
      std::string line;
      while (std::getline(in, line)) {
        const auto at = line.find("\"id\":\"") + 6;
        seen.insert(line.substr(at, line.find('"', at) - at));
        ++total;
      }
    }
    CHECK(total > 0);
    CHECK(seen.size() == total);
  }
}

TEST_CASE("seeded rng draws are uniform and in range") {
  SeededRng rng(42);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const auto x = rng.Below(6);
    REQUIRE(x < 6);
    ++counts[x];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
  SeededRng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.Below(1000003) == b.Below(1000003));
  CHECK_THROWS_AS(rng.Below(0), std::invalid_argument);
}

TEST_CASE("split allocation keeps targets or scales by largest remainder") {
  CHECK(AllocateSplits(100, {10, 20, 30}) == SplitSizes{10, 20, 30});
  CHECK(AllocateSplits(12, {10000, 2000, 2000}) == SplitSizes{8, 2, 2});
  CHECK(AllocateSplits(6, {2000, 2000, 2000}) == SplitSizes{2, 2, 2});
  CHECK(AllocateSplits(7, {2000, 2000, 2000}) == SplitSizes{3, 2, 2});
  CHECK(AllocateSplits(0, {5, 10, 10}) == SplitSizes{0, 0, 0});
}

// ---------------------------------------------------------------- CAP

TEST_CASE("pronoun-pronoun pairs are excluded") {
  CHECK(IsPronoun("he"));
  CHECK(IsPronoun("She"));
  CHECK(IsPronoun("themselves"));
  CHECK_FALSE(IsPronoun("dog"));
  CHECK_FALSE(IsPronoun("the"));

  CorefDocument doc;
  doc.id = "d";
  doc.sentences = {{"he", "met", "she", "and", "the", "dog", "."}};
  doc.mentions = {{0, {0, 0}, 0}, {0, {2, 2}, 1}, {0, {4, 5}, 0}};
  GenReport report;
  const auto pairs = CapCandidates(doc, &report);
  REQUIRE(pairs.size() == 2);
  CHECK(report.counts["cap.dropped_pronoun_pairs"] == 1);
  for (const auto &p : pairs) {
    CHECK_FALSE((MentionText(p.left) == "he" && MentionText(p.right) == "she"));
  }
  CHECK(pairs[0].label == 1);  // he ~ the dog
  CHECK(pairs[1].label == 0);
}

TEST_CASE("next-sentence pairs join the two sentences") {
  CorefDocument doc;
  doc.id = "d";
  doc.sentences = {{"mary", "sang", "."}, {"she", "left", "."},
                   {"john", "stayed", "."}};
  doc.mentions = {{0, {0, 0}, 0}, {1, {0, 0}, 0}, {2, {0, 0}, 1}};
  GenReport report;
  const auto pairs = CapCandidates(doc, &report);
  REQUIRE(pairs.size() == 2);  // sentences 0 and 2 are not adjacent
  CHECK(pairs[0].group == PairGroup::kNext);
  CHECK(Text(pairs[0].left) == "mary sang . she left .");
  CHECK(pairs[0].right.tokens == pairs[0].left.tokens);
  CHECK(MentionText(pairs[0].right) == "she");
  CHECK(pairs[0].label == 1);
  CHECK(MentionText(pairs[1].right) == "john");
  CHECK(pairs[1].label == 0);
}

TEST_CASE("cap output is label balanced within every cosine bin") {
  // Independent re-binning of the candidate pool.
  std::vector<CorefDocument> docs;
  for (const char *f : {"train.jsonl", "dev.jsonl"}) {
    for (auto &d : ReadCorefDocuments(fx::SourceDir(Task::kCap) + "/" + f)) {
      docs.push_back(std::move(d));
    }
  }
  GenReport report;
  const SplitSpec spec = fx::FixtureSpec();
  const auto rows = GenCap(docs, Vectors(), spec, &report);
  GenReport scratch;
  for (PairGroup group : {PairGroup::kSame, PairGroup::kNext}) {
    CAPTURE(PairGroupName(group));
    std::vector<std::pair<double, std::string>> pool;
    for (const auto &d : docs) {
      for (const auto &p : CapCandidates(d, &scratch)) {
        if (p.group != group) continue;
        const Eigen::VectorXf a = AverageWordVectors(Vectors(), p.left.MentionTokens());
        const Eigen::VectorXf b = AverageWordVectors(Vectors(), p.right.MentionTokens());
        if (a.norm() == 0 || b.norm() == 0) continue;
        const Eigen::VectorXd da = a.cast<double>(), db = b.cast<double>();
        pool.push_back({*Cosine(da, db), p.id});
      }
    }
    std::stable_sort(pool.begin(), pool.end(), [](const auto &x, const auto &y) {
      return x.first < y.first;
    });
    std::map<std::string, std::size_t> bin_of;
    const std::size_t n = pool.size();
    for (std::size_t r = 0; r < n; ++r) {
      bin_of[pool[r].second] = r * spec.cap_bins / n;
    }
    std::map<std::size_t, std::array<int, 2>> per_bin;
    std::size_t emitted = 0;
    for (const auto &split : rows) {
      std::array<int, 2> balance{0, 0};
      for (const auto &p : split) {
        if (p.group != group) continue;
        REQUIRE(bin_of.count(p.id));
        ++per_bin[bin_of[p.id]][p.label];
        ++balance[p.label];
        ++emitted;
      }
      CHECK(balance[0] == balance[1]);
    }
    CHECK(emitted > 0);
    for (const auto &[bin, c] : per_bin) {
      CAPTURE(bin);
      CHECK(c[0] == c[1]);
    }
  }
}

// ---------------------------------------------------------------- CERP

TEST_CASE("cerp emits the A-is-B / C-is-B / A-is-not-B / C-is-not-B pattern") {
  GenReport report;
  const auto assertions =
      ReadConceptNet(fx::SourceDir(Task::kCerp) + "/assertions.csv", &report);
  const auto rows = GenCerp(
      assertions, ReadNer(fx::SourceDir(Task::kCerp) + "/ner.jsonl"),
      Vectors(), fx::FixtureSpec(), &report);
  std::map<std::string, std::pair<std::string, int>> by_id;
  for (const auto &p : All(rows)) {
    CHECK(p.left.tokens == p.right.tokens);
    by_id[p.id] = {Text(p.left), p.label};
  }
  const std::string uri = "/a/[/r/IsA/,/c/en/paris/,/c/en/a_city/]";
  REQUIRE(by_id.count(uri + "#orig"));
  CHECK(by_id[uri + "#orig"] == std::make_pair(std::string("paris is a city"), 1));
  CHECK(by_id[uri + "#swap"] == std::make_pair(std::string("london is a city"), 0));
  CHECK(by_id[uri + "#neg"] == std::make_pair(std::string("paris is not a city"), 0));
  CHECK(by_id[uri + "#swap_neg"] ==
        std::make_pair(std::string("london is not a city"), 1));

  // Filters: French row, RelatedTo, "likely to find", numeric type, no NER
  // row, no relation verb.
  CHECK(report.counts["cerp.dropped_non_english"] == 1);
  CHECK(report.counts["cerp.dropped_relation"] == 2);
  CHECK(report.counts["cerp.dropped_no_entity"] == 1);
  CHECK(report.counts["cerp.dropped_no_ner"] == 1);
  CHECK(report.counts["cerp.dropped_no_relation_verb"] == 1);
  CHECK(by_id.size() == 4 * 10);

  for (const auto &split : rows) {
    const auto pos = std::count_if(split.begin(), split.end(),
                                   [](const PairInstance &p) { return p.label == 1; });
    CHECK(2 * pos == static_cast<long>(split.size()));
  }
}

TEST_CASE("cerp negation follows the first relation verb outside mentions") {
  ConceptAssertion a{"u", "/r/CapableOf", {"a", "cat", "can", "catch", "mice"},
                     {Span{0, 1}, Span{3, 4}}};
  std::array<PairInstance, 4> v;
  REQUIRE(CerpVariants(a, 0, {"the", "small", "dog"}, &v));
  CHECK(Text(v[1].left) == "the small dog can catch mice");
  CHECK(MentionText(v[1].left) == "the small dog");
  CHECK(MentionText(v[1].right) == "catch mice");
  CHECK(Text(v[2].left) == "a cat can not catch mice");
  CHECK(MentionText(v[2].right) == "catch mice");
  CHECK(Text(v[3].left) == "the small dog can not catch mice");
  CHECK(MentionText(v[3].right) == "catch mice");

  // Replacing the second argument leaves the verb position alone.
  REQUIRE(CerpVariants(a, 1, {"birds"}, &v));
  CHECK(Text(v[3].left) == "a cat can not birds");
  CHECK(MentionText(v[3].right) == "birds");

  ConceptAssertion none{"u", "/r/UsedFor", {"pens", "help", "writing"},
                        {Span{0, 0}, Span{2, 2}}};
  CHECK_FALSE(CerpVariants(none, 0, {"x"}, &v));
}

// ---------------------------------------------------------------- EFP

TEST_CASE("efp drops not-enough-info claims and picks one mention") {
  const auto claims = ReadFever(fx::SourceDir(Task::kEfp) + "/claims.jsonl");
  GenReport report;
  const auto rows = GenEfp(claims, fx::FixtureSpec(), &report);
  long nei = 0, empty = 0;
  for (const auto &c : claims) {
    if (c.label == "NOT ENOUGH INFO") ++nei;
    else if (c.mentions.empty()) ++empty;
  }
  CHECK(report.counts["efp.dropped_not_enough_info"] == nei);
  CHECK(report.counts["efp.dropped_no_mention"] == empty);
  std::map<std::string, const FeverClaim *> by_id;
  for (const auto &c : claims) by_id[c.id] = &c;
  for (const auto &r : All(rows)) {
    const FeverClaim &c = *by_id.at(r.mention.instance_id);
    CHECK(c.label != "NOT ENOUGH INFO");
    CHECK(r.label == (c.label == "SUPPORTS" ? 1 : 0));
    CHECK(std::find(c.mentions.begin(), c.mentions.end(), r.mention.span) !=
          c.mentions.end());
  }
  // 40 claims, 14 NEI, 2 more without mentions -> 24 kept, scaled 10:2:2.
  CHECK(rows[0].size() + rows[1].size() + rows[2].size() ==
        claims.size() - static_cast<std::size_t>(nei + empty));
  CHECK(rows[0].size() > rows[1].size());
}

// ---------------------------------------------------------------- ET

TEST_CASE("ultra-fine rows become typed mentions") {
  const auto types = ReadTypeVocab(fx::SourceDir(Task::kEt) + "/types.txt");
  GenReport report;
  const auto rows =
      ReadUltraFine(fx::SourceDir(Task::kEt) + "/train.json", types, &report);
  REQUIRE(rows.size() == 4);
  CHECK(Text(rows[0].mention) == "in 1990 , paris hosted a summit .");
  CHECK(MentionText(rows[1].mention) == "jane austen");
  CHECK(rows[2].mention.span == Span{0, 0});
  CHECK(rows[0].gold_types == std::set<int>{1, 3});
}

// ---------------------------------------------------------------- ERT

TEST_CASE("ert drops the name-predictable relation first") {
  const auto store =
      ReadDescriptionStore(fx::SourceDir(Task::kErt) + "/descriptions.jsonl");
  const auto tuples = ReadKbTuples(fx::SourceDir(Task::kErt) + "/tuples.tsv");
  GenReport report;
  const auto rows = GenErt(tuples, store, Vectors(), fx::FixtureSpec(), &report);
  std::map<std::string, std::array<int, 3>> per;
  for (int s = 0; s < 3; ++s) {
    for (const auto &r : rows[s]) ++per[r.relation][s];
  }
  CHECK(per.size() == 3);
  CHECK_FALSE(per.count(fx::kEasyRelation));
  for (const auto &[rel, c] : per) {
    CAPTURE(rel);
    CHECK(c == std::array<int, 3>{5, 10, 10});
  }
  CHECK(report.counts["ert.dropped_easy_relations"] == 1);
  CHECK(report.counts["ert.excluded_small_relations"] == 1);
  CHECK(report.counts["ert.dropped_no_description"] == 1);

  // With room for every relation nothing is dropped.
  SplitSpec all = fx::FixtureSpec();
  all.ert_relations = 626;
  GenReport r2;
  const auto kept = GenErt(tuples, store, Vectors(), all, &r2);
  CHECK(kept[0].size() == 4 * 5);
  CHECK(kept[2].size() == 4 * 10);
  CHECK_FALSE(r2.warnings.empty());
}

// ---------------------------------------------------------------- ESR

TEST_CASE("kore ranks map to scores 20 down to 1") {
  const fs::path dir = ScratchDir("kore");
  {
    std::ofstream f(dir / "kore.txt");
    f << "Seed Entity\n";
    for (int r = 1; r <= 20; ++r) f << "\tCandidate " << r << "\n";
  }
  const auto pairs = ReadKore((dir / "kore.txt").string());
  REQUIRE(pairs.size() == 20);
  CHECK(pairs[0].name2 == "Candidate 1");
  CHECK(pairs[0].score == 20.0);
  CHECK(pairs[19].score == 1.0);

  const auto fixture = ReadKore(fx::SourceDir(Task::kEsr) + "/kore.txt");
  REQUIRE(fixture.size() == 7);
  CHECK(fixture[0].score == 3.0);
  CHECK(fixture[3].name1 == "Google");
  CHECK(fixture[3].score == 4.0);
}

TEST_CASE("esr resolves names through the alignment file and titles") {
  const auto store =
      ReadDescriptionStore(fx::SourceDir(Task::kEsr) + "/descriptions.jsonl");
  std::map<std::string, std::vector<ScoredNamePair>> subsets;
  subsets["kore"] = ReadKore(fx::SourceDir(Task::kEsr) + "/kore.txt");
  CHECK_THROWS_AS(GenEsr(subsets, store, {}), DataError);
  try {
    GenEsr(subsets, store, {});
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("Android") != std::string::npos);
  }
  const auto rows = GenEsr(subsets, store, {{"Android", "Q10"}});
  CHECK(rows.size() == 7);
  CHECK(rows[4].entity2 == "Q10");
  CHECK(rows[0].entity1 == "Q1");
}

// ---------------------------------------------------------------- CoNLL

TEST_CASE("absent gold gets prior 1e-6 before normalization") {
  std::map<std::string, EntityDescription> descs;
  for (const char *id : {"A", "B", "C"}) descs[id] = {id, id, {"x"}};
  const auto c = BuildCandidates({{"A", 0.5}, {"B", 0.3}}, "C", descs, 30);
  REQUIRE(c.size() == 3);
  const double total = 0.8 + 1e-6;
  CHECK(c[0].entity_id == "A");
  CHECK(c[0].prior == doctest::Approx(0.5 / total).epsilon(1e-15));
  CHECK(c[1].prior == doctest::Approx(0.3 / total).epsilon(1e-15));
  CHECK(c[2].entity_id == "C");
  CHECK(c[2].prior == doctest::Approx(1e-6 / total).epsilon(1e-12));
  CHECK(std::abs(c[0].prior + c[1].prior + c[2].prior - 1.0) <= 1e-9);
}

TEST_CASE("candidate lists are cut to 30 with the gold kept") {
  std::map<std::string, EntityDescription> descs;
  std::vector<LinkCandidate> entries;
  for (int k = 0; k < 40; ++k) {
    const std::string id = "E" + std::to_string(k);
    descs[id] = {id, id, {"x"}};
    entries.push_back({id, 1.0 / (k + 1)});
  }
  entries.push_back({"NODESC", 0.9});
  auto c = BuildCandidates(entries, "E3", descs, 30);
  CHECK(c.size() == 30);
  CHECK(c.back().entity_id == "E29");
  c = BuildCandidates(entries, "E35", descs, 30);
  REQUIRE(c.size() == 30);
  CHECK(c[28].entity_id == "E28");
  CHECK(c.back().entity_id == "E35");
  double sum = 0;
  for (const auto &x : c) sum += x.prior;
  CHECK(std::abs(sum - 1.0) <= 1e-9);
  double total = 1.0 / 36;  // the gold keeps its own prior
  for (int k = 0; k < 29; ++k) total += 1.0 / (k + 1);
  CHECK(c.back().prior == doctest::Approx((1.0 / 36) / total));
  for (const auto &x : c) CHECK(x.entity_id != "NODESC");
  CHECK_THROWS_AS(BuildCandidates(entries, "MISSING", descs, 30), DataError);
}

TEST_CASE("conll fixture: NIL filtered, unseen mentions get the gold alone") {
  GenReport report;
  const auto store =
      ReadDescriptionStore(fx::SourceDir(Task::kConll) + "/descriptions.jsonl");
  const auto rows = GenConll(
      ReadNedMentions(fx::SourceDir(Task::kConll) + "/mentions.jsonl"),
      ReadCrossWikis(fx::SourceDir(Task::kConll) + "/crosswikis.tsv"), store,
      fx::FixtureSpec(), &report);
  CHECK(rows[0].size() == 30);
  CHECK(rows[1].size() == 10);
  CHECK(rows[2].size() == 10);
  CHECK(report.counts["conll.dropped_nil"] == 1);
  CHECK(report.counts["conll.no_crosswikis_entry"] == 1);
  for (const auto &r : All(rows)) {
    CAPTURE(r.mention.instance_id);
    CHECK(r.candidates.size() <= 30);
    CHECK_NOTHROW(r.GoldIndex());
    double sum = 0;
    for (const auto &c : r.candidates) {
      CHECK(c.entity_id != "E_NODESC");
      sum += c.prior;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    if (r.mention.instance_id == "conll/unseen") {
      REQUIRE(r.candidates.size() == 1);
      CHECK(r.candidates[0].prior == 1.0);
    }
  }
}

// ---------------------------------------------------------------- Rare

TEST_CASE("rare keeps only four-candidate single-blank instances") {
  const auto docs = ReadRare(fx::SourceDir(Task::kRare) + "/instances.jsonl");
  const auto store =
      ReadDescriptionStore(fx::SourceDir(Task::kRare) + "/descriptions.jsonl");
  GenReport report;
  const auto rows = GenRare(docs, store, fx::FixtureSpec(), &report);
  CHECK(report.counts["rare.dropped_candidate_count"] == 3);
  CHECK(report.counts["rare.dropped_blank_count"] == 3);
  std::size_t n = 0;
  for (const auto &r : All(rows)) {
    ++n;
    REQUIRE(r.candidates.size() == 4);
    for (const auto &c : r.candidates) CHECK(c.prior == 0.25);
    CHECK(r.mention.MentionTokens()[0] == kBlankToken);
    CHECK_NOTHROW(r.GoldIndex());
  }
  CHECK(n == 24);
  CHECK(rows[0].size() == 14);  // 24 split 10:4:4
  CHECK(rows[1].size() == 5);
  CHECK(rows[2].size() == 5);
}

TEST_CASE("written datasets read back unchanged") {
  const fs::path dir = ScratchDir("roundtrip");
  for (Task task : kAllTasks) Generate(task, dir / TaskName(task));
  const auto cap = ReadPairInstances(SplitPath((dir / "cap").string(), "train"));
  REQUIRE_FALSE(cap.empty());
  CHECK(cap[0].group.has_value());
  CHECK(cap[0].left.instance_id == cap[0].id + "#1");
  const auto links = ReadLinking(SplitPath((dir / "conll").string(), "test"));
  CHECK(links.size() == 10);
  const auto typed = ReadTyped(SplitPath((dir / "et").string(), "dev"));
  CHECK(typed.size() == 2);
  const auto sim = ReadSimilarity(SplitPath((dir / "esr").string(), "test"));
  CHECK(sim.size() == 7 + 4 + 4);
  const auto rel = ReadRelations(SplitPath((dir / "ert").string(), "dev"));
  CHECK(rel.size() == 30);
  const auto efp = ReadMentions(SplitPath((dir / "efp").string(), "train"));
  CHECK_FALSE(efp.empty());
  const auto descs =
      ReadDescriptionStore((dir / "rare" / "descriptions.jsonl").string());
  CHECK_FALSE(descs.empty());
  fs::remove_all(dir.parent_path());
}
