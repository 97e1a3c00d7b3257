#include "docspot/hashing.h"

#include <algorithm>
#include <random>

#include "docspot/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace docspot {
namespace {

BinaryCode random_code(std::size_t dims, std::mt19937_64& rng) {
  BinaryCode c(dims);
  for (auto& w : c.words) w = rng();
  c.canonicalize();
  return c;
}

std::uint32_t naive_hamming(const BinaryCode& a, const BinaryCode& b) {
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < a.dims; ++i) d += a.bit(i) != b.bit(i);
  return d;
}

TEST(FitBinarizerTest, SingleVectorThresholdsAreTheVector) {
  const std::vector<FeatureVector> corpus{{{0.5f, -1.0f, 3.0f}}};
  EXPECT_EQ(fit_binarizer(corpus).thresholds, corpus[0].values);
}

TEST(FitBinarizerTest, OddAndEvenMedians) {
  const std::vector<FeatureVector> odd{{{3.0f}}, {{1.0f}}, {{2.0f}}};
  EXPECT_EQ(fit_binarizer(odd).thresholds[0], 2.0f);
  const std::vector<FeatureVector> even{{{10.0f}}, {{0.0f}}};
  EXPECT_EQ(fit_binarizer(even).thresholds[0], 5.0f);
}

TEST(FitBinarizerTest, MatchesSortOracle) {
  std::mt19937 rng(4);
  std::normal_distribution<float> g;
  for (std::size_t rows : {1u, 2u, 5u, 8u, 33u}) {
    std::vector<float> matrix(rows * 7);
    for (auto& v : matrix) v = g(rng);
    const auto p = fit_binarizer(matrix, 7);
    for (std::size_t d = 0; d < 7; ++d) {
      std::vector<double> col;
      for (std::size_t r = 0; r < rows; ++r) col.push_back(matrix[r * 7 + d]);
      std::sort(col.begin(), col.end());
      const double median = rows % 2 ? col[rows / 2] : (col[rows / 2 - 1] + col[rows / 2]) / 2;
      EXPECT_NEAR(p.thresholds[d], median, 1e-6);
    }
  }
}

TEST(FitBinarizerTest, Errors) {
  EXPECT_THROW(fit_binarizer(std::vector<FeatureVector>{}), Error);
  const std::vector<FeatureVector> mixed{{{1.0f, 2.0f}}, {{1.0f}}};
  EXPECT_THROW(fit_binarizer(mixed), Error);
}

TEST(BinarizeTest, StrictThreshold) {
  BinarizerParams p{4, {0.1f, 0.2f, 0.3f, 0.4f}};
  const auto zeros = binarize(FeatureVector{p.thresholds}, p);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_FALSE(zeros.bit(i));
  FeatureVector up{p.thresholds};
  for (auto& v : up.values) v += 1.0f;
  const auto ones = binarize(up, p);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(ones.bit(i));
  EXPECT_EQ(ones.words[0], 0xFu);
  EXPECT_THROW(binarize(FeatureVector{{1.0f}}, p), Error);
}

TEST(BinarizeTest, SixtyFiveDimsUseTwoWords) {
  BinarizerParams p{65, std::vector<float>(65, 0.0f)};
  const auto code = binarize(FeatureVector{std::vector<float>(65, 1.0f)}, p);
  ASSERT_EQ(code.words.size(), 2u);
  EXPECT_EQ(code.words[0], ~0ull);
  EXPECT_EQ(code.words[1], 1u);
}

TEST(BinarizeTest, MedianCodesAreBalancedOnOddCorpora) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<float> u;
  std::vector<FeatureVector> corpus(31);
  for (auto& v : corpus)
    for (int d = 0; d < 70; ++d) v.values.push_back(u(rng));
  const auto p = fit_binarizer(corpus);
  std::vector<int> ones(70, 0);
  for (const auto& v : corpus) {
    const auto c = binarize(v, p);
    for (int d = 0; d < 70; ++d) ones[d] += c.bit(d);
  }
  for (int d = 0; d < 70; ++d) EXPECT_EQ(ones[d], 15);
}

TEST(HammingTest, Examples) {
  BinaryCode q(4), p(4);
  q.set_bit(0, true);
  q.set_bit(2, true);  // 1010
  p.set_bit(1, true);
  p.set_bit(2, true);  // 0110
  EXPECT_EQ(hamming_distance(q, p), 2u);
  EXPECT_EQ(hamming_distance(q, q), 0u);
  std::mt19937_64 rng(1);
  for (std::size_t d : {1u, 63u, 64u, 65u, 640u, 1000u}) {
    const BinaryCode a = random_code(d, rng);
    BinaryCode comp = a;
    for (auto& w : comp.words) w = ~w;
    comp.canonicalize();
    EXPECT_EQ(hamming_distance(a, comp), d);
  }
  EXPECT_THROW(hamming_distance(BinaryCode(4), BinaryCode(5)), Error);
}

TEST(HammingTest, MatchesNaiveLoop) {
  std::mt19937_64 rng(11);
  for (std::size_t d : {64u, 65u, 640u, 1024u}) {
    for (int i = 0; i < 500; ++i) {
      const BinaryCode a = random_code(d, rng), b = random_code(d, rng);
      EXPECT_EQ(hamming_distance(a, b), naive_hamming(a, b));
    }
  }
}

TEST(HammingTest, IsAMetric) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    const BinaryCode a = random_code(130, rng), b = random_code(130, rng), c = random_code(130, rng);
    EXPECT_EQ(hamming_distance(a, b), hamming_distance(b, a));
    EXPECT_EQ(hamming_distance(a, b) == 0, a == b);
    EXPECT_LE(hamming_distance(a, c), hamming_distance(a, b) + hamming_distance(b, c));
  }
}

TEST(HammingTest, PaddingNeverCounts) {
  std::mt19937_64 rng(13);
  for (std::size_t d : {1u, 65u, 100u, 1000u}) {
    for (int i = 0; i < 100; ++i) {
      const BinaryCode a = random_code(d, rng), b = random_code(d, rng);
      BinaryCode dirty = a;
      if (d % 64) dirty.words.back() |= ~0ull << (d % 64);
      EXPECT_EQ(hamming_distance(dirty, b), hamming_distance(a, b));
      dirty.canonicalize();
      EXPECT_EQ(dirty, a);
    }
  }
}

TEST(CodeFileTest, RoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(5);
  const std::vector<std::uint64_t> ids{4, 9};
  std::vector<std::uint64_t> words;
  for (int i = 0; i < 2; ++i) {
    const auto c = random_code(65, rng);
    words.insert(words.end(), c.words.begin(), c.words.end());
  }
  write_code_file(dir / "c.pshash", ids, words, 65);
  const auto f = read_code_file(dir / "c.pshash");
  EXPECT_EQ(f.dims, 65u);
  EXPECT_EQ(f.ids, ids);
  EXPECT_EQ(f.words, words);
}

}  // namespace
}  // namespace docspot
