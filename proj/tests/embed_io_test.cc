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

#include <random>
#include <sstream>

#include "doctest.h"
#include "enteval/embed_io.h"

using namespace enteval;

namespace {

EmbeddingSet RandomSet(std::mt19937 &rng, std::size_t n, std::size_t layers,
                       std::size_t dim) {
  std::uniform_real_distribution<float> u(-3.0f, 3.0f);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("inst-" + std::to_string(i));
  std::vector<float> values(n * layers * dim);
  for (auto &v : values) v = u(rng);
  return EmbeddingSet(ids, layers, dim, values);
}

std::string Serialize(const EmbeddingSet &s) {
  std::ostringstream out(std::ios::binary);
  WriteEmbeddings(s, out);
  return out.str();
}

EmbeddingSet Parse(const std::string &bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return ReadEmbeddings(in);
}

}  // namespace

TEST_CASE("2x3x4 round trip and header layout") {
  std::mt19937 rng(1);
  const auto set = RandomSet(rng, 2, 3, 4);
  const std::string bytes = Serialize(set);
  CHECK(bytes.substr(0, 4) == "EEV1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version, little-endian
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);  // n_instances
  CHECK(static_cast<unsigned char>(bytes[16]) == 3);  // n_layers
  CHECK(static_cast<unsigned char>(bytes[20]) == 4);  // dim
  CHECK(bytes.size() == 32 + std::string("inst-0\ninst-1\n").size() + 4 * 24);
  CHECK(Parse(bytes) == set);
  CHECK(set.Layers(1).col(2) == set.Vector(1, 2));
}

TEST_CASE("round trip is bit exact for random sets, including odd floats") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> sz(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    auto set = RandomSet(rng, sz(rng), 1 + sz(rng), 1 + sz(rng));
    if (set.n_instances() > 0) {
      auto v = set.MutableVector(0, 0);
      v(0) = -0.0f;
      v(v.size() - 1) = std::numeric_limits<float>::denorm_min();
    }
    const auto back = Parse(Serialize(set));
    CHECK(back == set);
    CHECK(back.Checksum() == set.Checksum());
  }
}

TEST_CASE("format errors") {
  std::mt19937 rng(2);
  const std::string good = Serialize(RandomSet(rng, 4, 1, 2));
  std::string bad = good;
  bad[0] = 'X';
  CHECK_THROWS_WITH_AS(Parse(bad), doctest::Contains("magic"), FormatError);

  // Header claims five instances but the id block holds four.
  std::string wrong_n = good;
  wrong_n[8] = 5;
  CHECK_THROWS_WITH_AS(Parse(wrong_n), doctest::Contains("offset"), FormatError);

  CHECK_THROWS_WITH_AS(Parse(good.substr(0, good.size() - 3)),
                       doctest::Contains("truncated payload"), FormatError);
  CHECK_THROWS_AS(Parse(good + "x"), FormatError);
}

TEST_CASE("duplicate ids rejected") {
  CHECK_THROWS_AS(EmbeddingSet({"a", "a"}, 1, 1), std::invalid_argument);
}

TEST_CASE("word vector loading") {
  std::istringstream two("the 0 1 2\ncat 1 0 2\n");
  auto t = LoadWordVectors(two);
  CHECK(t.dim == 3);
  CHECK(t.entries.size() == 2);

  std::istringstream bad("the 0 1 2\ncat 1 0\n");
  CHECK_THROWS_WITH_AS(LoadWordVectors(bad), doctest::Contains("line 2"),
                       FormatError);

  std::istringstream dup("the 0 1\nThe 5 5\ncat 1 1\n");
  auto d = LoadWordVectors(dup);
  CHECK(d.duplicate_warnings == 1);
  CHECK((*d.Find("the"))(0) == 0.0f);
}

TEST_CASE("averaging encoder") {
  WordVectorTable t;
  t.dim = 2;
  t.entries["the"] = Eigen::Vector2f(0, 1);
  t.entries["cat"] = Eigen::Vector2f(1, 0);

  AvgvecStats stats;
  MentionContext m{"m", {"a", "the", "cat", "sat"}, {1, 2}};
  CHECK(AvgvecEncodeMention(t, m, &stats) == Eigen::Vector2f(0.5f, 0.5f));
  m.span = {2, 2};
  CHECK(AvgvecEncodeMention(t, m, &stats) == Eigen::Vector2f(1, 0));
  m.span = {3, 3};
  CHECK(AvgvecEncodeMention(t, m, &stats).isZero());
  CHECK(stats.all_oov == 1);
  CHECK(stats.encoded == 3);

  EntityDescription d{"e", "E", {"the", "cat"}};
  CHECK(AvgvecEncodeDescription(t, d) == Eigen::Vector2f(0.5f, 0.5f));
  d.tokens = {"cat"};
  CHECK(AvgvecEncodeDescription(t, d) == Eigen::Vector2f(1, 0));
  d.tokens = {"zzz", "yyy"};
  AvgvecStats s2;
  CHECK(AvgvecEncodeDescription(t, d, &s2).isZero());
  CHECK(s2.all_oov == 1);
}

TEST_CASE("averaging is permutation invariant and keeps table dim") {
  std::mt19937 rng(5);
  WordVectorTable t;
  t.dim = 7;
  std::vector<std::string> vocab;
  for (int i = 0; i < 30; ++i) {
    vocab.push_back("w" + std::to_string(i));
    t.entries[vocab.back()] = Eigen::VectorXf::Random(7);
  }
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> toks(1 + trial % 9);
    for (auto &x : toks) x = vocab[rng() % vocab.size()];
    const auto a = AverageWordVectors(t, toks);
    std::shuffle(toks.begin(), toks.end(), rng);
    const auto b = AverageWordVectors(t, toks);
    CHECK(a.size() == 7);
    CHECK(a.isApprox(b, 1e-6f));
  }
}
