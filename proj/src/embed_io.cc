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

#include "enteval/embed_io.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

namespace enteval {

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, std::size_t n_layers,
                           std::size_t dim)
    : EmbeddingSet(std::move(ids), n_layers, dim, {}) {}

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, std::size_t n_layers,
                           std::size_t dim, std::vector<float> values)
    : ids_(std::move(ids)),
      n_layers_(n_layers),
      dim_(dim),
      values_(std::move(values)) {
  const std::size_t expected = ids_.size() * n_layers_ * dim_;
  if (values_.empty()) {
    values_.assign(expected, 0.0f);
  } else if (values_.size() != expected) {
    throw std::invalid_argument("EmbeddingSet: payload has " +
                                std::to_string(values_.size()) +
                                " values, expected " + std::to_string(expected));
  }
  BuildIndex();
}

void EmbeddingSet::BuildIndex() {
  index_.clear();
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw std::invalid_argument("EmbeddingSet: duplicate id " + ids_[i]);
    }
  }
}

std::size_t EmbeddingSet::IndexOf(const std::string &id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("no embedding for id " + id);
  return it->second;
}

std::uint64_t EmbeddingSet::Checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void *data, std::size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const char sep = '\n';
  for (const auto &id : ids_) {
    mix(id.data(), id.size());
    mix(&sep, 1);
  }
  mix(values_.data(), values_.size() * sizeof(float));
  return h;
}

bool EmbeddingSet::operator==(const EmbeddingSet &other) const {
  if (ids_ != other.ids_ || n_layers_ != other.n_layers_ || dim_ != other.dim_ ||
      values_.size() != other.values_.size()) {
    return false;
  }
  return std::memcmp(values_.data(), other.values_.data(),
                     values_.size() * sizeof(float)) == 0;
}

namespace {

template <typename T>
void PutLittle(std::ostream &out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char *>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::istream &in) : in_(in) {}

  void Bytes(void *dst, std::size_t n, const char *what) {
    in_.read(static_cast<char *>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError("EEV1: truncated " + std::string(what) + " at offset " +
                        std::to_string(offset_ + in_.gcount()));
    }
    offset_ += n;
  }

  template <typename T>
  T Little(const char *what) {
    unsigned char bytes[sizeof(T)];
    Bytes(bytes, sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(bytes[i]) << (8 * i);
    }
    return v;
  }

  std::uint64_t offset() const { return offset_; }
  bool AtEnd() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream &in_;
  std::uint64_t offset_ = 0;
};

}  // namespace

void WriteEmbeddings(const EmbeddingSet &set, std::ostream &out) {
  std::string id_block;
  for (const auto &id : set.ids()) {
    if (id.find('\n') != std::string::npos) {
      throw std::invalid_argument("EEV1: id contains a newline: " + id);
    }
    id_block += id;
    id_block += '\n';
  }
  out.write(kEevMagic, 4);
  PutLittle<std::uint32_t>(out, kEevVersion);
  PutLittle<std::uint64_t>(out, set.n_instances());
  PutLittle<std::uint32_t>(out, static_cast<std::uint32_t>(set.n_layers()));
  PutLittle<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
  PutLittle<std::uint64_t>(out, id_block.size());
  out.write(id_block.data(), static_cast<std::streamsize>(id_block.size()));
  for (float v : set.values()) {
    PutLittle<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw FormatError("EEV1: write failed");
}

void WriteEmbeddings(const EmbeddingSet &set, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  WriteEmbeddings(set, out);
}

EmbeddingSet ReadEmbeddings(std::istream &in) {
  Reader r(in);
  char magic[4];
  r.Bytes(magic, 4, "magic");
  if (std::memcmp(magic, kEevMagic, 4) != 0) {
    throw FormatError("EEV1: bad magic at offset 0");
  }
  const auto version = r.Little<std::uint32_t>("version");
  if (version != kEevVersion) {
    throw FormatError("EEV1: unsupported version " + std::to_string(version) +
                      " at offset 4");
  }
  const auto n = r.Little<std::uint64_t>("n_instances");
  const auto n_layers = r.Little<std::uint32_t>("n_layers");
  const auto dim = r.Little<std::uint32_t>("dim");
  const std::uint64_t block_offset = r.offset();
  const auto block_size = r.Little<std::uint64_t>("id block size");
  // Guard absurd headers before allocating.
  if (block_size > (std::uint64_t{1} << 40) || n > (std::uint64_t{1} << 40)) {
    throw FormatError("EEV1: implausible header sizes at offset " +
                      std::to_string(block_offset));
  }
  std::string block(block_size, '\0');
  r.Bytes(block.data(), block.size(), "id block");
  std::vector<std::string> ids;
  std::size_t start = 0;
  while (start < block.size()) {
    const std::size_t nl = block.find('\n', start);
    if (nl == std::string::npos) {
      throw FormatError("EEV1: unterminated id at offset " +
                        std::to_string(block_offset + 8 + start));
    }
    ids.push_back(block.substr(start, nl - start));
    start = nl + 1;
  }
  if (ids.size() != n) {
    throw FormatError("EEV1: header declares " + std::to_string(n) +
                      " instances but id block at offset " +
                      std::to_string(block_offset + 8) + " holds " +
                      std::to_string(ids.size()));
  }
  const std::uint64_t count = n * n_layers * dim;
  std::vector<float> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(r.Little<std::uint32_t>("payload"));
  }
  if (!r.AtEnd()) {
    throw FormatError("EEV1: trailing bytes at offset " +
                      std::to_string(r.offset()));
  }
  try {
    return EmbeddingSet(std::move(ids), n_layers, dim, std::move(values));
  } catch (const std::invalid_argument &e) {
    throw FormatError(std::string("EEV1: ") + e.what());
  }
}

EmbeddingSet ReadEmbeddings(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open embeddings file: " + path);
  return ReadEmbeddings(in);
}

WordVectorTable LoadWordVectors(std::istream &in) {
  WordVectorTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<float> buf;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) {
      throw FormatError("word vectors: no values on line " +
                        std::to_string(line_no));
    }
    std::string token = Lowercase(line.substr(0, sp));
    buf.clear();
    const char *p = line.data() + sp;
    const char *end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      float v = 0.0f;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw FormatError("word vectors: bad number on line " +
                          std::to_string(line_no));
      }
      buf.push_back(v);
      p = next;
    }
    if (table.dim == 0) {
      table.dim = buf.size();
    } else if (buf.size() != table.dim) {
      throw FormatError("word vectors: line " + std::to_string(line_no) +
                        " has " + std::to_string(buf.size()) +
                        " values, expected " + std::to_string(table.dim));
    }
    if (table.entries.count(token)) {
      ++table.duplicate_warnings;
      std::cerr << "warning: duplicate word vector for '" << token
                << "' on line " << line_no << " ignored\n";
      continue;
    }
    table.entries.emplace(std::move(token),
                          Eigen::Map<Eigen::VectorXf>(buf.data(), buf.size()));
  }
  return table;
}

WordVectorTable LoadWordVectors(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open word vectors: " + path);
  return LoadWordVectors(in);
}

Eigen::VectorXf AverageWordVectors(const WordVectorTable &table,
                                   std::span<const std::string> tokens,
                                   AvgvecStats *stats) {
  Eigen::VectorXf sum = Eigen::VectorXf::Zero(table.dim);
  std::size_t hits = 0;
  for (const auto &t : tokens) {
    if (const auto *v = table.Find(t)) {
      sum += *v;
      ++hits;
    } else if (stats) {
      ++stats->oov_tokens;
    }
  }
  if (stats) {
    ++stats->encoded;
    if (hits == 0) ++stats->all_oov;
  }
  if (hits == 0) return sum;
  return sum / static_cast<float>(hits);
}

Eigen::VectorXf AvgvecEncodeMention(const WordVectorTable &table,
                                    const MentionContext &mention,
                                    AvgvecStats *stats) {
  mention.Validate();
  return AverageWordVectors(table, mention.MentionTokens(), stats);
}

Eigen::VectorXf AvgvecEncodeDescription(const WordVectorTable &table,
                                        const EntityDescription &desc,
                                        AvgvecStats *stats) {
  return AverageWordVectors(table, desc.tokens, stats);
}

}  // namespace enteval
