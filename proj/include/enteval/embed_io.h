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

// Frozen-representation exchange: the EEV1 binary container, GloVe-style
// word-vector tables, and the word-averaging baseline encoder.
//
// EEV1 layout (all integers little-endian):
//
//   offset  size  field
//   0       4     magic "EEV1"
//   4       4     u32 version (1)
//   8       8     u64 n_instances
//   16      4     u32 n_layers
//   20      4     u32 dim
//   24      8     u64 id block byte count B
//   32      B     instance ids, each terminated by '\n' (UTF-8)
//   32+B    4*N   f32 payload, instance-major then layer-major then dim

#ifndef ENTEVAL_EMBED_IO_H_
#define ENTEVAL_EMBED_IO_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "enteval/core.h"

namespace enteval {

inline constexpr char kEevMagic[4] = {'E', 'E', 'V', '1'};
inline constexpr std::uint32_t kEevVersion = 1;

class EmbeddingSet {
 public:
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXf>;
  using ConstLayersMap = Eigen::Map<const Eigen::MatrixXf>;

  EmbeddingSet() = default;
  // Zero-filled set. Throws std::invalid_argument on duplicate ids.
  EmbeddingSet(std::vector<std::string> ids, std::size_t n_layers,
               std::size_t dim);
  EmbeddingSet(std::vector<std::string> ids, std::size_t n_layers,
               std::size_t dim, std::vector<float> values);

  std::size_t n_instances() const { return ids_.size(); }
  std::size_t n_layers() const { return n_layers_; }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string> &ids() const { return ids_; }
  const std::vector<float> &values() const { return values_; }

  // Instance i, layer l as a dim-vector.
  ConstVectorMap Vector(std::size_t i, std::size_t l) const {
    return ConstVectorMap(values_.data() + (i * n_layers_ + l) * dim_,
                          static_cast<Eigen::Index>(dim_));
  }
  Eigen::Map<Eigen::VectorXf> MutableVector(std::size_t i, std::size_t l) {
    return Eigen::Map<Eigen::VectorXf>(
        values_.data() + (i * n_layers_ + l) * dim_,
        static_cast<Eigen::Index>(dim_));
  }
  // Instance i as a dim x n_layers matrix (one column per layer).
  ConstLayersMap Layers(std::size_t i) const {
    return ConstLayersMap(values_.data() + i * n_layers_ * dim_,
                          static_cast<Eigen::Index>(dim_),
                          static_cast<Eigen::Index>(n_layers_));
  }

  // Index of an instance id; throws DataError when absent.
  std::size_t IndexOf(const std::string &id) const;
  bool Contains(const std::string &id) const { return index_.count(id) > 0; }

  // FNV-1a over the payload and ids; used to assert that runners never
  // mutate frozen embeddings.
  std::uint64_t Checksum() const;

  bool operator==(const EmbeddingSet &other) const;

 private:
  void BuildIndex();

  std::vector<std::string> ids_;
  std::size_t n_layers_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

void WriteEmbeddings(const EmbeddingSet &set, std::ostream &out);
void WriteEmbeddings(const EmbeddingSet &set, const std::string &path);
// Throws FormatError naming the byte offset of the failure.
EmbeddingSet ReadEmbeddings(std::istream &in);
EmbeddingSet ReadEmbeddings(const std::string &path);

struct WordVectorTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, Eigen::VectorXf> entries;
  std::size_t duplicate_warnings = 0;

  const Eigen::VectorXf *Find(const std::string &token) const {
    auto it = entries.find(token);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// Text format: one token followed by `dim` space-separated floats per line.
// Tokens are lower-cased on load; the first occurrence of a duplicate wins.
WordVectorTable LoadWordVectors(std::istream &in);
WordVectorTable LoadWordVectors(const std::string &path);

struct AvgvecStats {
  std::size_t encoded = 0;
  std::size_t all_oov = 0;
  std::size_t oov_tokens = 0;
};

// Mean of in-vocabulary vectors; the zero vector when nothing is in
// vocabulary (counted in stats->all_oov).
Eigen::VectorXf AverageWordVectors(const WordVectorTable &table,
                                   std::span<const std::string> tokens,
                                   AvgvecStats *stats = nullptr);

Eigen::VectorXf AvgvecEncodeMention(const WordVectorTable &table,
                                    const MentionContext &mention,
                                    AvgvecStats *stats = nullptr);

Eigen::VectorXf AvgvecEncodeDescription(const WordVectorTable &table,
                                        const EntityDescription &desc,
                                        AvgvecStats *stats = nullptr);

}  // namespace enteval

#endif  // ENTEVAL_EMBED_IO_H_
