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

// Hyperlink pair extraction from MediaWiki XML dumps.
//
// Two passes over the dump. The first builds a PageIndex of article titles,
// one-hop redirects and descriptions (the first 100 body tokens, starting at
// the first paragraph, title not included). The second cleans each
// article's wikitext, splits it into sentences and emits one HyperlinkPair
// per resolvable link in every sentence that carries at least one link.

#ifndef ENTEVAL_WIKIENT_H_
#define ENTEVAL_WIKIENT_H_

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "enteval/core.h"

namespace enteval {

struct HyperlinkPair {
  MentionContext context;  // instance_id is the pair id
  std::string entity_id;
  EntityDescription description;
};

struct WikiPage {
  std::string title;
  int ns = 0;
  std::string redirect;  // normalized target, empty if not a redirect
  std::string text;      // raw wikitext, XML entities decoded
};

// Streams <page> elements out of a dump. Malformed pages are reported as
// errors and skipped; the stream continues.
class DumpReader {
 public:
  explicit DumpReader(std::istream &in) : in_(in) {}

  // Returns false at end of input. On a malformed page, returns true with
  // `error` set and `page` unspecified.
  bool Next(WikiPage *page, std::string *error);

 private:
  std::istream &in_;
  std::string buffer_;
  bool eof_ = false;
};

// Decodes the five named XML entities and numeric character references.
std::string XmlUnescape(std::string_view text);

// Trims, maps '_' to ' ', collapses runs of spaces, drops a "#section"
// suffix and upper-cases the first byte.
std::string NormalizeTitle(std::string_view title);

struct WikiLink {
  std::size_t begin = 0;  // byte range of the anchor in Paragraph::text
  std::size_t end = 0;
  std::string target;  // normalized
};

struct Paragraph {
  std::string text;
  std::vector<WikiLink> links;
};

// Strips templates, tables, comments, references, HTML tags, file and
// category links, headings, list lines and bold/italic quotes. Internal
// links become their anchor text (with any trailing lower-case letters
// attached) and are recorded. Throws FormatError on unbalanced "{{" or "[[".
std::vector<Paragraph> CleanWikitext(std::string_view markup);

// First min(100, n) tokens; DataError when `tokens` is empty.
EntityDescription TruncateDescription(std::string entity_id, std::string title,
                                      std::vector<std::string> tokens);

struct ExtractStats {
  long pages = 0;            // article pages seen (ns 0, not redirects)
  long skipped_pages = 0;    // malformed pages
  long linked_sentences = 0;  // sentences with at least one aligned link
  long multi_link_sentences = 0;
  long links = 0;             // aligned links in linked sentences
  long kept = 0;              // emitted pairs
  long dropped_no_description = 0;
  long dropped_misaligned = 0;  // anchors not on token boundaries
};

class PageIndex {
 public:
  // First pass. Malformed pages are skipped silently here; ExtractPairs
  // logs and counts them.
  static PageIndex Build(std::istream &dump);

  void AddArticle(const std::string &title, std::vector<std::string> tokens);
  void AddRedirect(const std::string &from, const std::string &to);

  // Follows at most one redirect; nullptr when nothing with a nonempty
  // description is found.
  const EntityDescription *Resolve(const std::string &title) const;

  std::size_t articles() const { return descriptions_.size(); }

 private:
  std::unordered_map<std::string, EntityDescription> descriptions_;
  std::unordered_map<std::string, std::string> redirects_;
};

// Pairs for one cleaned article, in sentence then link order. Pair ids are
// "<title>#<k>" with k counting the page's emitted pairs.
std::vector<HyperlinkPair> PagePairs(const std::string &title,
                                     const std::vector<Paragraph> &paragraphs,
                                     const PageIndex &index,
                                     ExtractStats *stats);

// Second pass over the dump.
void ExtractPairs(std::istream &dump, const PageIndex &index,
                  const std::function<void(const HyperlinkPair &)> &emit,
                  ExtractStats *stats, std::ostream *log);

// JSONL: {"id","context","span","entity_id"} per pair, and
// {"entity_id","title","description"} per description.
void WritePair(const HyperlinkPair &pair, std::ostream &out);
void WriteDescription(const EntityDescription &d, std::ostream &out);

std::map<std::string, EntityDescription> ReadDescriptions(
    const std::string &path);
// Joins the pair file with the description store; DataError when a pair
// names an entity missing from the store.
std::vector<HyperlinkPair> ReadPairs(
    const std::string &path,
    const std::map<std::string, EntityDescription> &descriptions);

}  // namespace enteval

#endif  // ENTEVAL_WIKIENT_H_
