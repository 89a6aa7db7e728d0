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

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "enteval/text.h"
#include "enteval/wikient.h"
#include "wiki_fixture.h"

using namespace enteval;

namespace {

struct Run {
  std::vector<HyperlinkPair> pairs;
  ExtractStats stats;
  std::string log;
};

Run ExtractFixture() {
  std::ifstream first(wiki_fixture::DumpPath());
  REQUIRE(first);
  const PageIndex index = PageIndex::Build(first);
  std::ifstream second(wiki_fixture::DumpPath());
  Run r;
  std::ostringstream log;
  ExtractPairs(second, index, [&](const HyperlinkPair &p) { r.pairs.push_back(p); },
               &r.stats, &log);
  r.log = log.str();
  return r;
}

std::string Join(std::span<const std::string> words) {
  std::string s;
  for (const auto &w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

}  // namespace

TEST_CASE("fixture dump yields the hand-counted pairs") {
  const auto t0 = std::chrono::steady_clock::now();
  const Run r = ExtractFixture();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 5.0);
  CHECK(r.pairs.size() == static_cast<std::size_t>(wiki_fixture::kKeptPairs));
  CHECK(r.stats.kept == wiki_fixture::kKeptPairs);
  CHECK(r.stats.pages == wiki_fixture::kArticlePages);
  CHECK(r.stats.skipped_pages == wiki_fixture::kSkippedPages);
  CHECK(r.stats.dropped_no_description == wiki_fixture::kDroppedNoDescription);
  CHECK(r.stats.dropped_misaligned == wiki_fixture::kDroppedMisaligned);
  CHECK(r.stats.linked_sentences == wiki_fixture::kLinkedSentences);
  CHECK(r.stats.multi_link_sentences == wiki_fixture::kMultiLinkSentences);
  CHECK(r.stats.links == wiki_fixture::kLinks);
  // Conservation.
  CHECK(r.stats.kept == r.stats.links - r.stats.dropped_no_description);
  CHECK(r.log.find("Broken markup") != std::string::npos);
  CHECK(r.log.find("<text>") != std::string::npos);
}

TEST_CASE("two links in one sentence emit two pairs") {
  const Run r = ExtractFixture();
  std::vector<const HyperlinkPair *> capital;
  for (const auto &p : r.pairs) {
    if (p.context.instance_id.rfind("France#", 0) == 0 &&
        Join(p.context.tokens).find("its capital") == 0) {
      capital.push_back(&p);
    }
  }
  REQUIRE(capital.size() == 2);
  CHECK(capital[0]->context.tokens == capital[1]->context.tokens);
  CHECK(!(capital[0]->context.span == capital[1]->context.span));
  CHECK(capital[0]->entity_id == "Paris");
  CHECK(capital[1]->entity_id == "Marseille");
}

TEST_CASE("spans cover the anchor text") {
  const Run r = ExtractFixture();
  std::map<std::string, std::string> anchors;
  for (const auto &p : r.pairs) {
    p.context.Validate();
    CHECK(p.description.tokens.size() <= 100);
    anchors[p.context.instance_id] = Join(p.context.MentionTokens());
  }
  CHECK(anchors["Louvre#0"] == "the french capital");
  CHECK(anchors["Parisians#0"] == "parisians");
  CHECK(anchors["Lyon#1"] == "the capital");
  CHECK(anchors["Paris#0"] == "france");
  // Redirect followed one hop.
  for (const auto &p : r.pairs) {
    if (p.context.instance_id == "Lyon#1") CHECK(p.entity_id == "Paris");
  }
}

TEST_CASE("extraction is deterministic") {
  auto dump = [] {
    std::ostringstream out;
    for (const auto &p : ExtractFixture().pairs) WritePair(p, out);
    return out.str();
  };
  CHECK(dump() == dump());
}

TEST_CASE("descriptions truncate to 100 tokens") {
  std::vector<std::string> t150(150, "w");
  CHECK(TruncateDescription("e", "E", t150).tokens.size() == 100);
  std::vector<std::string> t50(50, "w");
  CHECK(TruncateDescription("e", "E", t50).tokens.size() == 50);
  std::vector<std::string> t100(100, "w");
  CHECK(TruncateDescription("e", "E", t100).tokens.size() == 100);
  CHECK_THROWS_AS(TruncateDescription("e", "E", {}), DataError);

  std::ifstream in(wiki_fixture::DumpPath());
  const PageIndex index = PageIndex::Build(in);
  const EntityDescription *longest = index.Resolve("Long article");
  REQUIRE(longest != nullptr);
  REQUIRE(longest->tokens.size() == 100);
  CHECK(longest->tokens.front() == "tok1");
  CHECK(longest->tokens.back() == "tok100");
  CHECK(index.Resolve("Stub") == nullptr);
  CHECK(index.Resolve("Paris, France") == index.Resolve("Paris"));
  // Descriptions start at the body, not the title.
  const EntityDescription *paris = index.Resolve("Paris");
  REQUIRE(paris != nullptr);
  CHECK(Join(paris->tokens).rfind("paris is the capital of france .", 0) == 0);
}

TEST_CASE("wikitext cleanup") {
  const auto paras = CleanWikitext(
      "{{a|{{b}}}}A <b>bold</b> [[X_y|anchor]]s.<ref name=\"r\"/> "
      "[[Category:Z]]\n== H ==\nNext [[:Q]] para.\n\n* list");
  REQUIRE(paras.size() == 2);
  CHECK(paras[0].text == "A bold anchors. ");
  CHECK(paras[1].text == "Next Q para.");
  REQUIRE(paras[0].links.size() == 1);
  REQUIRE(paras[1].links.size() == 1);
  CHECK(paras[1].links[0].target == "Q");
  CHECK(paras[0].links[0].target == "X y");
  CHECK(paras[0].text.substr(paras[0].links[0].begin,
                             paras[0].links[0].end - paras[0].links[0].begin) ==
        "anchors");
  CHECK_THROWS_AS(CleanWikitext("x {{open"), FormatError);
  CHECK_THROWS_AS(CleanWikitext("x [[open"), FormatError);
}

TEST_CASE("titles and entities") {
  CHECK(NormalizeTitle("  paris_france#History ") == "Paris france");
  CHECK(XmlUnescape("a &amp; b &lt;c&gt; &#233;&#x41;") == "a & b <c> \xC3\xA9" "A");
}

TEST_CASE("pair and description files round trip") {
  const Run r = ExtractFixture();
  const std::string pairs_path = "wikient_test_pairs.jsonl";
  const std::string desc_path = "wikient_test_desc.jsonl";
  {
    std::ofstream p(pairs_path), d(desc_path);
    std::map<std::string, EntityDescription> seen;
    for (const auto &pair : r.pairs) {
      WritePair(pair, p);
      seen.emplace(pair.entity_id, pair.description);
    }
    for (const auto &[id, desc] : seen) WriteDescription(desc, d);
  }
  const auto descs = ReadDescriptions(desc_path);
  const auto back = ReadPairs(pairs_path, descs);
  REQUIRE(back.size() == r.pairs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].context.tokens == r.pairs[i].context.tokens);
    CHECK(back[i].context.span == r.pairs[i].context.span);
    CHECK(back[i].description.tokens == r.pairs[i].description.tokens);
  }
  CHECK_THROWS_AS(ReadPairs(pairs_path, {}), DataError);
  std::remove(pairs_path.c_str());
  std::remove(desc_path.c_str());
}
