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

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "enteval/core.h"
#include "enteval/text.h"
#include "oracles.h"

using namespace enteval;

TEST_CASE("pair feature examples") {
  Eigen::Vector2d a(1, 2);
  Eigen::VectorXd f = MakePairFeature(a, a);
  Eigen::VectorXd expect(8);
  expect << 1, 2, 1, 2, 1, 4, 0, 0;
  CHECK(f == expect);

  Eigen::Vector2d e1(1, 0), e2(0, 1);
  expect << 1, 0, 0, 1, 0, 0, 1, 1;
  CHECK(MakePairFeature(e1, e2) == expect);

  Eigen::VectorXf big = Eigen::VectorXf::Random(300);
  CHECK(MakePairFeature(big, big).size() == 1200);
}

TEST_CASE("pair feature rejects dimension mismatch") {
  Eigen::VectorXd a(3), b(2);
  a.setOnes();
  b.setOnes();
  CHECK_THROWS_AS(MakePairFeature(a, b), std::invalid_argument);
}

TEST_CASE("pair feature properties on random inputs") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dim(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dim(rng);
    Eigen::VectorXd x = Eigen::VectorXd::Random(d);
    Eigen::VectorXd y = Eigen::VectorXd::Random(d);
    CHECK(MakePairFeature(x, y).size() == 4 * d);
    const Eigen::VectorXd self = MakePairFeature(x, x);
    CHECK(self.segment(2 * d, d) == x.cwiseProduct(x));
    CHECK(self.tail(d).isZero(0.0));
  }
}

TEST_CASE("spearman examples") {
  std::vector<double> a{1, 2, 3}, r{3, 2, 1}, b{1, 3, 2};
  CHECK(Spearman(a, a) == doctest::Approx(1.0));
  CHECK(Spearman(r, a) == doctest::Approx(-1.0));
  // 1 - 6 * (0 + 1 + 1) / (3 * 8)
  CHECK(Spearman(a, b) == doctest::Approx(0.5));
}

TEST_CASE("spearman error paths") {
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(Spearman(one, one), UndefinedCorrelation);
  std::vector<double> flat{2, 2, 2}, a{1, 2, 3};
  CHECK_THROWS_AS(Spearman(flat, a), UndefinedCorrelation);
}

TEST_CASE("fractional ranks average ties") {
  std::vector<double> v{10, 20, 20, 5};
  const auto r = FractionalRanks(v);
  CHECK(r == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("spearman matches brute-force oracle and invariants") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> size(2, 20), level(0, 6);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = size(rng);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = level(rng);
      b[i] = level(rng);
    }
    const auto oracle = oracles::BruteForceSpearman(a, b);
    if (!oracle) {
      CHECK_THROWS_AS(Spearman(a, b), UndefinedCorrelation);
      continue;
    }
    ++checked;
    const double rho = Spearman(a, b);
    CHECK(std::abs(rho - *oracle) < 1e-12);
    CHECK(std::abs(rho - Spearman(b, a)) < 1e-15);
    CHECK(std::abs(rho) <= 1.0);
    // Strictly monotone transforms leave ranks unchanged.
    std::vector<double> ta(n);
    std::transform(a.begin(), a.end(), ta.begin(),
                   [](double x) { return std::exp(0.3 * x) - 4.0; });
    CHECK(Spearman(ta, b) == doctest::Approx(rho).epsilon(1e-12));
  }
  CHECK(checked > 400);
}

TEST_CASE("multilabel f1 examples") {
  std::vector<std::set<int>> gold{{1, 2}, {3}};
  auto perfect = MultilabelF1(gold, gold);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  auto half = MultilabelF1({{1}}, {{1, 2}});
  CHECK(half.precision == 1.0);
  CHECK(half.recall == 0.5);
  CHECK(half.f1 == doctest::Approx(2.0 / 3.0));

  auto empty = MultilabelF1({{}, {}}, gold);
  CHECK(empty.f1 == 0.0);
  CHECK(empty.recall == 0.0);
}

TEST_CASE("multilabel f1 is permutation invariant and matches oracle") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> n_inst(1, 12), n_lab(0, 4), lab(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = n_inst(rng);
    std::vector<std::set<int>> pred(n), gold(n);
    for (int i = 0; i < n; ++i) {
      for (int k = n_lab(rng); k > 0; --k) pred[i].insert(lab(rng));
      for (int k = n_lab(rng); k > 0; --k) gold[i].insert(lab(rng));
    }
    const auto got = MultilabelF1(pred, gold);
    const auto want = oracles::HandMacroF1(pred, gold);
    CHECK(got.precision == want.precision);
    CHECK(got.recall == want.recall);
    CHECK(got.f1 == want.f1);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::set<int>> p2, g2;
    for (int i : perm) {
      p2.push_back(pred[i]);
      g2.push_back(gold[i]);
    }
    CHECK(MultilabelF1(p2, g2).f1 == doctest::Approx(got.f1).epsilon(1e-12));
  }
}

TEST_CASE("micro f1 pools counts") {
  auto m = MultilabelMicroF1({{1}, {2, 3}}, {{1, 2}, {3}});
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("accuracy") {
  std::vector<int> g{1, 0, 1, 1};
  CHECK(Accuracy(g, g) == 1.0);
  std::vector<int> none{0, 1, 0, 0};
  CHECK(Accuracy(none, g) == 0.0);
  std::vector<int> three{1, 0, 1, 0};
  CHECK(Accuracy(three, g) == 0.75);
  std::vector<int> empty;
  CHECK_THROWS_AS(Accuracy(empty, empty), std::invalid_argument);
}

TEST_CASE("mention context validation") {
  MentionContext m{"x", {"the", "cat"}, {0, 1}};
  CHECK_NOTHROW(m.Validate());
  m.span = {1, 2};
  CHECK_THROWS_AS(m.Validate(), std::invalid_argument);
  m.span = {0, 0};
  m.tokens = {"The"};
  CHECK_THROWS_AS(m.Validate(), std::invalid_argument);
  TypedInstance t{{"y", {"a"}, {0, 0}}, {kNumEntityTypes}};
  CHECK_THROWS_AS(t.Validate(), DataError);
}

TEST_CASE("tokenizer splits punctuation and lowercases") {
  const auto toks = Tokenize("Dell's  revenue: $14.5B (2019).");
  const std::vector<std::string> want{"dell", "'",  "s", "revenue", ":", "$",
                                      "14",   ".",  "5b", "(",      "2019",
                                      ")",    "."};
  CHECK(toks == want);
  const auto off = TokenizeWithOffsets("ab cd");
  REQUIRE(off.size() == 2);
  CHECK(off[1].begin == 3);
  CHECK(off[1].end == 5);
}

TEST_CASE("sentence splitter respects abbreviations") {
  const std::string text =
      "Mr. Smith went to Washington. He met Dr. Jones! Then J. Doe left? "
      "Yes.";
  const auto sents = SplitSentences(text);
  REQUIRE(sents.size() == 4);
  CHECK(text.substr(sents[0].begin, sents[0].end - sents[0].begin) ==
        "Mr. Smith went to Washington.");
  CHECK(text.substr(sents[1].begin, sents[1].end - sents[1].begin) ==
        "He met Dr. Jones!");
  CHECK(text.substr(sents[3].begin, sents[3].end - sents[3].begin) == "Yes.");
}
