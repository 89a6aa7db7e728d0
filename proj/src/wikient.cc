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

#include "enteval/wikient.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "enteval/text.h"
#include "json.hpp"

namespace enteval {
namespace {

using ordered_json = nlohmann::ordered_json;

bool StartsWith(std::string_view s, std::size_t at, std::string_view prefix) {
  return s.substr(at, prefix.size()) == prefix;
}

bool StartsWithNoCase(std::string_view s, std::size_t at,
                      std::string_view prefix) {
  if (s.size() - std::min(at, s.size()) < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[at + i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Index just past the close matching the open at `at`, or npos.
std::size_t MatchNested(std::string_view s, std::size_t at,
                        std::string_view open, std::string_view close) {
  int depth = 0;
  std::size_t i = at;
  while (i < s.size()) {
    if (StartsWith(s, i, open)) {
      ++depth;
      i += open.size();
    } else if (StartsWith(s, i, close)) {
      --depth;
      i += close.size();
      if (depth == 0) return i;
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

// Text between <tag> and </tag> inside `page`, if present.
std::optional<std::string_view> Element(std::string_view page,
                                        std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  const auto b = page.find(open);
  if (b == std::string_view::npos) return std::nullopt;
  const auto e = page.find(close, b + open.size());
  if (e == std::string_view::npos) return std::nullopt;
  return page.substr(b + open.size(), e - b - open.size());
}

bool IsSkippedNamespace(std::string_view target) {
  static const char *kPrefixes[] = {"file:",     "image:",  "category:",
                                    "media:",    "wikipedia:", "template:",
                                    "help:",     "portal:", "user:",
                                    "talk:",     "special:", "wp:"};
  for (const char *p : kPrefixes) {
    if (StartsWithNoCase(target, 0, p)) return true;
  }
  // Interlanguage links such as "fr:Paris".
  const auto colon = target.find(':');
  if (colon == 2 || colon == 3) {
    return std::all_of(target.begin(), target.begin() + colon, [](char c) {
      return std::islower(static_cast<unsigned char>(c));
    });
  }
  return false;
}

std::string StripQuotes(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (StartsWith(s, i, "''")) {
      while (i + 1 < s.size() && s[i + 1] == '\'') ++i;
      continue;
    }
    out += s[i];
  }
  return out;
}

struct Flat {
  std::string text;
  std::vector<WikiLink> links;  // offsets into text
};

// Character-level pass: drops markup, keeps text and link anchors.
Flat Flatten(std::string_view m) {
  Flat f;
  std::size_t i = 0;
  auto at_line_start = [&](std::size_t k) { return k == 0 || m[k - 1] == '\n'; };
  while (i < m.size()) {
    if (StartsWith(m, i, "<!--")) {
      const auto e = m.find("-->", i + 4);
      i = e == std::string_view::npos ? m.size() : e + 3;
    } else if (StartsWith(m, i, "{{")) {
      const auto e = MatchNested(m, i, "{{", "}}");
      if (e == std::string_view::npos) throw FormatError("unbalanced {{ template");
      i = e;
    } else if (StartsWith(m, i, "{|") && at_line_start(i)) {
      const auto e = MatchNested(m, i, "{|", "|}");
      if (e == std::string_view::npos) throw FormatError("unterminated table");
      i = e;
    } else if (StartsWithNoCase(m, i, "<ref")) {
      const auto close = m.find('>', i);
      if (close == std::string_view::npos) throw FormatError("unterminated <ref");
      if (m[close - 1] == '/') {
        i = close + 1;
      } else {
        const auto e = m.find("</ref>", close);
        if (e == std::string_view::npos) throw FormatError("unterminated <ref>");
        i = e + 6;
      }
    } else if (m[i] == '<' && i + 1 < m.size() &&
               (std::isalpha(static_cast<unsigned char>(m[i + 1])) ||
                m[i + 1] == '/')) {
      const auto e = m.find('>', i);
      if (e == std::string_view::npos) {
        f.text += m[i++];
      } else {
        i = e + 1;
      }
    } else if (StartsWith(m, i, "[[")) {
      const auto e = MatchNested(m, i, "[[", "]]");
      if (e == std::string_view::npos) throw FormatError("unbalanced [[ link");
      const std::string_view inner = m.substr(i + 2, e - i - 4);
      i = e;
      std::string_view target = Trim(inner.substr(0, inner.find('|')));
      if (!target.empty() && target[0] == ':') target = Trim(target.substr(1));
      if (IsSkippedNamespace(target)) continue;
      const auto bar = inner.find('|');
      std::string anchor(bar == std::string_view::npos ? target
                                                       : Trim(inner.substr(bar + 1)));
      if (anchor.empty()) anchor = std::string(target);
      anchor = StripQuotes(anchor);
      while (i < m.size() && std::islower(static_cast<unsigned char>(m[i]))) {
        anchor += m[i++];
      }
      const std::string norm = NormalizeTitle(target);
      if (!norm.empty() && !anchor.empty()) {
        f.links.push_back({f.text.size(), f.text.size() + anchor.size(), norm});
      }
      f.text += anchor;
    } else if (m[i] == '[' && (StartsWith(m, i + 1, "http://") ||
                               StartsWith(m, i + 1, "https://") ||
                               StartsWith(m, i + 1, "//"))) {
      const auto e = m.find(']', i);
      if (e == std::string_view::npos) {
        f.text += m[i++];
        continue;
      }
      const std::string_view inner = m.substr(i + 1, e - i - 1);
      const auto sp = inner.find(' ');
      if (sp != std::string_view::npos) f.text += Trim(inner.substr(sp + 1));
      i = e + 1;
    } else if (StartsWith(m, i, "''")) {
      while (i < m.size() && m[i] == '\'') ++i;
    } else if (StartsWith(m, i, "&nbsp;")) {
      f.text += ' ';
      i += 6;
    } else if (StartsWith(m, i, "&ndash;") || StartsWith(m, i, "&mdash;")) {
      f.text += '-';
      i += 7;
    } else {
      f.text += m[i++];
    }
  }
  return f;
}

bool IsBodyLine(std::string_view line) {
  const auto t = Trim(line);
  if (t.empty()) return false;
  switch (t[0]) {
    case '=':  // heading
    case '*':  // list
    case '#':
    case ':':
    case ';':
    case '|':  // table residue
    case '!':
      return false;
    default:
      return true;
  }
}

}  // namespace

std::string XmlUnescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i];
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    if (name == "lt") {
      out += '<';
    } else if (name == "gt") {
      out += '>';
    } else if (name == "amp") {
      out += '&';
    } else if (name == "quot") {
      out += '"';
    } else if (name == "apos") {
      out += '\'';
    } else if (!name.empty() && name[0] == '#') {
      unsigned long cp = 0;
      try {
        cp = name.size() > 1 && (name[1] == 'x' || name[1] == 'X')
                 ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                 : std::stoul(std::string(name.substr(1)), nullptr, 10);
      } catch (const std::exception &) {
        out += s[i];
        continue;
      }
      // UTF-8 encode.
      if (cp < 0x80) {
        out += static_cast<char>(cp);
      } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      }
    } else {
      // Unknown entity: keep verbatim for the wikitext pass.
      out += s[i];
      continue;
    }
    i = semi;
  }
  return out;
}

std::string NormalizeTitle(std::string_view title) {
  std::string_view t = title.substr(0, title.find('#'));
  std::string out;
  bool space = false;
  for (char c : t) {
    if (c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

bool DumpReader::Next(WikiPage *page, std::string *error) {
  error->clear();
  std::size_t start = std::string::npos;
  while (true) {
    if (start == std::string::npos) {
      start = buffer_.find("<page>");
      if (start == std::string::npos && buffer_.size() > 8) {
        buffer_.erase(0, buffer_.size() - 8);
      }
    }
    if (start != std::string::npos) {
      const auto end = buffer_.find("</page>", start);
      const auto again = buffer_.find("<page>", start + 6);
      if (again != std::string::npos && (end == std::string::npos || again < end)) {
        buffer_.erase(0, again);
        *error = "page without </page>";
        return true;
      }
      if (end != std::string::npos) {
        const std::string body = buffer_.substr(start + 6, end - start - 6);
        buffer_.erase(0, end + 7);
        const auto title = Element(body, "title");
        if (!title) {
          *error = "page without <title>";
          return true;
        }
        page->title = NormalizeTitle(XmlUnescape(*title));
        page->ns = 0;
        if (const auto ns = Element(body, "ns")) {
          try {
            page->ns = std::stoi(std::string(*ns));
          } catch (const std::exception &) {
            *error = "bad <ns> in page " + page->title;
            return true;
          }
        }
        page->redirect.clear();
        const auto r = body.find("<redirect title=\"");
        if (r != std::string::npos) {
          const auto q = body.find('"', r + 17);
          if (q != std::string::npos) {
            page->redirect = NormalizeTitle(XmlUnescape(body.substr(r + 17, q - r - 17)));
          }
        }
        const auto t = body.find("<text");
        if (t == std::string::npos) {
          *error = "page without <text>: " + page->title;
          return true;
        }
        const auto gt = body.find('>', t);
        if (gt == std::string::npos) {
          *error = "unterminated <text> in page " + page->title;
          return true;
        }
        if (body[gt - 1] == '/') {
          page->text.clear();
        } else {
          const auto close = body.find("</text>", gt);
          if (close == std::string::npos) {
            *error = "unterminated <text> in page " + page->title;
            return true;
          }
          page->text = XmlUnescape(std::string_view(body).substr(gt + 1, close - gt - 1));
        }
        if (page->redirect.empty() && StartsWithNoCase(page->text, 0, "#redirect")) {
          const auto b = page->text.find("[[");
          const auto e = page->text.find("]]", b == std::string::npos ? 0 : b);
          if (b != std::string::npos && e != std::string::npos) {
            const std::string_view in = std::string_view(page->text).substr(b + 2, e - b - 2);
            page->redirect = NormalizeTitle(in.substr(0, in.find('|')));
          }
        }
        return true;
      }
    }
    if (eof_) {
      if (start != std::string::npos) {
        buffer_.clear();
        *error = "page without </page> at end of input";
        return true;
      }
      return false;
    }
    std::string line;
    if (std::getline(in_, line)) {
      buffer_ += line;
      buffer_ += '\n';
    } else {
      eof_ = true;
    }
  }
}

std::vector<Paragraph> CleanWikitext(std::string_view markup) {
  const Flat flat = Flatten(markup);
  std::vector<Paragraph> out;
  const std::string &s = flat.text;
  std::size_t para_begin = std::string::npos, para_end = 0;
  auto close = [&]() {
    if (para_begin == std::string::npos) return;
    Paragraph p;
    p.text = s.substr(para_begin, para_end - para_begin);
    std::replace(p.text.begin(), p.text.end(), '\n', ' ');
    for (const auto &l : flat.links) {
      if (l.begin >= para_begin && l.end <= para_end) {
        p.links.push_back({l.begin - para_begin, l.end - para_begin, l.target});
      }
    }
    out.push_back(std::move(p));
    para_begin = std::string::npos;
  };
  std::size_t line_begin = 0;
  while (line_begin <= s.size()) {
    auto line_end = s.find('\n', line_begin);
    if (line_end == std::string::npos) line_end = s.size();
    const std::string_view line(s.data() + line_begin, line_end - line_begin);
    if (IsBodyLine(line)) {
      if (para_begin == std::string::npos) para_begin = line_begin;
      para_end = line_end;
    } else {
      close();
    }
    line_begin = line_end + 1;
  }
  close();
  return out;
}

EntityDescription TruncateDescription(std::string entity_id, std::string title,
                                      std::vector<std::string> tokens) {
  if (tokens.empty()) throw DataError("empty description for " + entity_id);
  if (tokens.size() > static_cast<std::size_t>(kMaxDescriptionTokens)) {
    tokens.resize(kMaxDescriptionTokens);
  }
  return {std::move(entity_id), std::move(title), std::move(tokens)};
}

PageIndex PageIndex::Build(std::istream &dump) {
  PageIndex index;
  DumpReader reader(dump);
  WikiPage page;
  std::string error;
  while (reader.Next(&page, &error)) {
    if (!error.empty() || page.ns != 0) continue;
    if (!page.redirect.empty()) {
      index.AddRedirect(page.title, page.redirect);
      continue;
    }
    std::vector<Paragraph> paragraphs;
    try {
      paragraphs = CleanWikitext(page.text);
    } catch (const FormatError &) {
      continue;
    }
    std::vector<std::string> tokens;
    for (const auto &p : paragraphs) {
      for (auto &t : Tokenize(p.text)) {
        tokens.push_back(std::move(t));
        if (tokens.size() == static_cast<std::size_t>(kMaxDescriptionTokens)) break;
      }
      if (tokens.size() == static_cast<std::size_t>(kMaxDescriptionTokens)) break;
    }
    index.AddArticle(page.title, std::move(tokens));
  }
  return index;
}

void PageIndex::AddArticle(const std::string &title,
                           std::vector<std::string> tokens) {
  if (tokens.empty()) return;
  descriptions_.insert_or_assign(title,
                                 TruncateDescription(title, title, std::move(tokens)));
}

void PageIndex::AddRedirect(const std::string &from, const std::string &to) {
  redirects_.insert_or_assign(from, to);
}

const EntityDescription *PageIndex::Resolve(const std::string &title) const {
  if (const auto it = descriptions_.find(title); it != descriptions_.end()) {
    return &it->second;
  }
  if (const auto r = redirects_.find(title); r != redirects_.end()) {
    if (const auto it = descriptions_.find(r->second); it != descriptions_.end()) {
      return &it->second;
    }
  }
  return nullptr;
}

std::vector<HyperlinkPair> PagePairs(const std::string &title,
                                     const std::vector<Paragraph> &paragraphs,
                                     const PageIndex &index,
                                     ExtractStats *stats) {
  std::vector<HyperlinkPair> out;
  for (const auto &para : paragraphs) {
    const auto sentences = SplitSentences(para.text);
    std::vector<bool> placed(para.links.size(), false);
    for (const auto &sent : sentences) {
      const std::string_view text(para.text.data() + sent.begin,
                                  sent.end - sent.begin);
      const auto tokens = TokenizeWithOffsets(text);
      std::vector<std::pair<Span, const WikiLink *>> aligned;
      for (std::size_t li = 0; li < para.links.size(); ++li) {
        const WikiLink &link = para.links[li];
        if (placed[li] || link.begin < sent.begin || link.begin >= sent.end) {
          continue;
        }
        placed[li] = true;
        if (link.end > sent.end) {
          ++stats->dropped_misaligned;
          continue;
        }
        const std::size_t lb = link.begin - sent.begin, le = link.end - sent.begin;
        std::optional<std::size_t> first, last;
        bool straddles = false;
        for (std::size_t k = 0; k < tokens.size(); ++k) {
          const auto &t = tokens[k];
          if ((t.begin < lb && t.end > lb) || (t.begin < le && t.end > le)) {
            straddles = true;
          }
          if (t.begin >= lb && t.end <= le) {
            if (!first) first = k;
            last = k;
          }
        }
        if (straddles || !first) {
          ++stats->dropped_misaligned;
          continue;
        }
        aligned.push_back({Span{*first, *last}, &link});
      }
      if (aligned.empty()) continue;
      ++stats->linked_sentences;
      if (aligned.size() > 1) ++stats->multi_link_sentences;
      std::vector<std::string> words;
      for (const auto &t : tokens) words.push_back(t.text);
      for (const auto &[span, link] : aligned) {
        ++stats->links;
        const EntityDescription *d = index.Resolve(link->target);
        if (d == nullptr) {
          ++stats->dropped_no_description;
          continue;
        }
        HyperlinkPair p;
        p.context = {title + "#" + std::to_string(out.size()), words, span};
        p.entity_id = d->entity_id;
        p.description = *d;
        out.push_back(std::move(p));
        ++stats->kept;
      }
    }
    // Anchors that fall between sentence ranges.
    for (bool b : placed) {
      if (!b) ++stats->dropped_misaligned;
    }
  }
  return out;
}

void ExtractPairs(std::istream &dump, const PageIndex &index,
                  const std::function<void(const HyperlinkPair &)> &emit,
                  ExtractStats *stats, std::ostream *log) {
  DumpReader reader(dump);
  WikiPage page;
  std::string error;
  while (reader.Next(&page, &error)) {
    if (!error.empty()) {
      ++stats->skipped_pages;
      if (log) *log << "skipping page: " << error << "\n";
      continue;
    }
    if (page.ns != 0 || !page.redirect.empty()) continue;
    ++stats->pages;
    std::vector<Paragraph> paragraphs;
    try {
      paragraphs = CleanWikitext(page.text);
    } catch (const FormatError &e) {
      ++stats->skipped_pages;
      if (log) *log << "skipping page " << page.title << ": " << e.what() << "\n";
      continue;
    }
    for (const auto &p : PagePairs(page.title, paragraphs, index, stats)) emit(p);
  }
}

void WritePair(const HyperlinkPair &pair, std::ostream &out) {
  ordered_json j;
  j["id"] = pair.context.instance_id;
  j["context"] = pair.context.tokens;
  j["span"] = {pair.context.span.start, pair.context.span.end};
  j["entity_id"] = pair.entity_id;
  out << j.dump() << "\n";
}

void WriteDescription(const EntityDescription &d, std::ostream &out) {
  ordered_json j;
  j["entity_id"] = d.entity_id;
  j["title"] = d.title;
  j["description"] = d.tokens;
  out << j.dump() << "\n";
}

namespace {

template <typename F>
void ForEachJsonLine(const std::string &path, F &&f) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (Trim(line).empty()) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception &e) {
      throw FormatError(path + ":" + std::to_string(n) + ": " + e.what());
    } catch (const std::invalid_argument &e) {
      throw FormatError(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

}  // namespace

std::map<std::string, EntityDescription> ReadDescriptions(
    const std::string &path) {
  std::map<std::string, EntityDescription> out;
  ForEachJsonLine(path, [&](const nlohmann::json &j) {
    EntityDescription d{j.at("entity_id").get<std::string>(),
                        j.at("title").get<std::string>(),
                        j.at("description").get<std::vector<std::string>>()};
    d.Validate();
    out.insert_or_assign(d.entity_id, std::move(d));
  });
  return out;
}

std::vector<HyperlinkPair> ReadPairs(
    const std::string &path,
    const std::map<std::string, EntityDescription> &descriptions) {
  std::vector<HyperlinkPair> out;
  ForEachJsonLine(path, [&](const nlohmann::json &j) {
    HyperlinkPair p;
    p.context.instance_id = j.at("id").get<std::string>();
    p.context.tokens = j.at("context").get<std::vector<std::string>>();
    const auto span = j.at("span").get<std::vector<std::size_t>>();
    if (span.size() != 2) throw std::invalid_argument("span must have two ends");
    p.context.span = {span[0], span[1]};
    p.context.Validate();
    p.entity_id = j.at("entity_id").get<std::string>();
    const auto it = descriptions.find(p.entity_id);
    if (it == descriptions.end()) {
      throw DataError("pair " + p.context.instance_id + " names entity " +
                      p.entity_id + " missing from the description store");
    }
    p.description = it->second;
    out.push_back(std::move(p));
  });
  return out;
}

}  // namespace enteval
