#include "docspot/imgproc.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "docspot/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace docspot {
namespace {

using testing::random_image;

TEST(ToGrayscaleTest, KnownColors) {
  Image img(2, 1, 3);
  for (int c = 0; c < 3; ++c) img.at(0, 0, c) = 1.0f;
  img.at(1, 0, 0) = 1.0f;
  const Image g = to_grayscale(img);
  ASSERT_EQ(g.channels(), 1);
  EXPECT_NEAR(g.at(0, 0), 1.0, 1e-6);
  EXPECT_NEAR(g.at(1, 0), 0.299, 1e-6);
}

TEST(ToGrayscaleTest, GrayIsFixedPoint) {
  Image img(16, 1, 3);
  for (int x = 0; x < 16; ++x)
    for (int c = 0; c < 3; ++c) img.at(x, 0, c) = x / 15.0f;
  const Image g = to_grayscale(img);
  for (int x = 0; x < 16; ++x) EXPECT_NEAR(g.at(x, 0), x / 15.0, 1e-6);
}

TEST(ToGrayscaleTest, RejectsSingleChannel) {
  EXPECT_THROW(to_grayscale(Image(3, 3, 1)), Error);
}

TEST(ResizeBilinearTest, IdentityAtSameSize) {
  const Image img = random_image(13, 7, 3, 1);
  EXPECT_EQ(resize_bilinear(img, 13, 7), img);
}

TEST(ResizeBilinearTest, UpsampleTwoPixels) {
  Image img(2, 1, 1);
  img.at(1, 0) = 1.0f;
  const Image out = resize_bilinear(img, 3, 1);
  ASSERT_EQ(out.width(), 3);
  EXPECT_FLOAT_EQ(out.at(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(out.at(1, 0), 0.5f);
  EXPECT_FLOAT_EQ(out.at(2, 0), 1.0f);
}

TEST(ResizeBilinearTest, ConstantStaysConstant) {
  const Image out = resize_bilinear(Image(17, 9, 3, 0.375f), 224, 224);
  for (float v : out.pixels()) EXPECT_FLOAT_EQ(v, 0.375f);
}

TEST(ResizeBilinearTest, StaysWithinInputRange) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Image img = random_image(11 + seed, 5 + 3 * seed, 3, seed);
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    const Image out = resize_bilinear(img, 40, 23);
    for (float v : out.pixels()) {
      EXPECT_GE(v, *lo - 1e-6f);
      EXPECT_LE(v, *hi + 1e-6f);
    }
  }
}

TEST(ResizeBilinearTest, ZeroTargetIsAnError) {
  const Image img(4, 4, 1);
  EXPECT_THROW(resize_bilinear(img, 0, 4), Error);
  EXPECT_THROW(resize_bilinear(img, 4, 0), Error);
}

TEST(EdgeBinarizeTest, ConstantImageHasNoEdges) {
  EXPECT_EQ(edge_binarize(Image(20, 20, 1, 0.6f), EdgeParams{}).count(), 0u);
}

// One row of the step image, run through blur, central-difference Sobel
// response and 1D non-maximum suppression with the same tie rule.
std::vector<int> step_edge_columns(int w, int step_at, const EdgeParams& p) {
  std::vector<double> row(w);
  for (int x = 0; x < w; ++x) row[x] = x >= step_at ? 1.0 : 0.0;
  const int r = std::max(1, static_cast<int>(std::ceil(3 * p.sigma)));
  std::vector<double> k;
  double sum = 0;
  for (int i = -r; i <= r; ++i) {
    k.push_back(std::exp(-i * i / (2 * p.sigma * p.sigma)));
    sum += k.back();
  }
  auto clampx = [&](int x) { return std::min(std::max(x, 0), w - 1); };
  std::vector<double> b(w);
  for (int x = 0; x < w; ++x) {
    double acc = 0;
    for (int i = -r; i <= r; ++i) acc += k[i + r] / sum * row[clampx(x + i)];
    b[x] = acc;
  }
  std::vector<double> m(w);
  for (int x = 0; x < w; ++x) {
    m[x] = 4.0 * std::abs(b[clampx(x + 1)] - b[clampx(x - 1)]) / (4.0 * std::numbers::sqrt2);
  }
  std::vector<int> cols;
  for (int x = 0; x < w; ++x) {
    const double behind = x > 0 ? m[x - 1] : 0.0;
    const double ahead = x + 1 < w ? m[x + 1] : 0.0;
    if (m[x] >= p.high && m[x] > behind + 1e-9 && m[x] >= ahead - 1e-9) cols.push_back(x);
  }
  return cols;
}

TEST(EdgeBinarizeTest, VerticalStepGivesOnePixelLine) {
  Image img(16, 16, 1);
  for (int y = 0; y < 16; ++y)
    for (int x = 8; x < 16; ++x) img.at(x, y) = 1.0f;
  const EdgeParams params;
  const auto cols = step_edge_columns(16, 8, params);
  ASSERT_EQ(cols.size(), 1u);
  const BinaryImage edges = edge_binarize(img, params);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      EXPECT_EQ(edges.at(x, y), x == cols[0]) << x << "," << y;
    }
  }
}

TEST(EdgeBinarizeTest, HighThresholdSuppressesEverything) {
  const Image img = random_image(24, 24, 1, 3);
  EXPECT_EQ(edge_binarize(img, 0.99, 0.99).count(), 0u);
}

TEST(EdgeBinarizeTest, InvariantToBrightnessOffset) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Image img = random_image(30, 20, 1, seed);
    for (auto& v : img.pixels()) v *= 0.5f;
    Image shifted = img;
    for (auto& v : shifted.pixels()) v += 0.25f;
    EXPECT_EQ(edge_binarize(img, EdgeParams{}), edge_binarize(shifted, EdgeParams{}));
  }
}

TEST(EdgeBinarizeTest, RejectsBadThresholds) {
  const Image img(8, 8, 1);
  EXPECT_THROW(edge_binarize(img, 0.5, 0.2), Error);
  EXPECT_THROW(edge_binarize(Image(8, 8, 3), EdgeParams{}), Error);
}

TEST(MeanIntensityTest, SingleOnPixel) {
  Image img(2, 2, 1);
  img.at(0, 0) = 1.0f;
  EXPECT_DOUBLE_EQ(mean_intensity(img), 0.25);
  BinaryImage bits(2, 2);
  bits.set(0, 0, true);
  EXPECT_DOUBLE_EQ(mean_intensity(bits), 0.25);
}

TEST(MeanIntensityTest, ConcatenationAveragesEqualHalves) {
  const Image a = random_image(6, 4, 1, 11);
  const Image b = random_image(6, 4, 1, 12);
  Image both(12, 4, 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) {
      both.at(x, y) = a.at(x, y);
      both.at(x + 6, y) = b.at(x, y);
    }
  }
  EXPECT_NEAR(mean_intensity(both), (mean_intensity(a) + mean_intensity(b)) / 2, 1e-12);
}

TEST(MeanIntensityTest, EmptyIsAnError) {
  EXPECT_THROW(mean_intensity(Image()), Error);
  EXPECT_THROW(mean_intensity(BinaryImage()), Error);
}

TEST(MeanIntensityTest, WindowCountsOnlyItsPixels) {
  BinaryImage bits(4, 4);
  bits.set(3, 3, true);
  EXPECT_DOUBLE_EQ(mean_intensity(bits, 2, 2, 4, 4), 0.25);
  EXPECT_DOUBLE_EQ(mean_intensity(bits, 0, 0, 2, 2), 0.0);
}

}  // namespace
}  // namespace docspot
