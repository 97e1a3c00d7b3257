#include "docspot/box.h"

#include <random>

#include "gtest/gtest.h"

namespace docspot {
namespace {

// Counts pixels on a grid that covers both boxes.
double pixel_iou(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.right(), b.right()), y1 = std::max(a.bottom(), b.bottom());
  long inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = x >= a.x && x < a.right() && y >= a.y && y < a.bottom();
      const bool in_b = x >= b.x && x < b.right() && y >= b.y && y < b.bottom();
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

TEST(IouTest, HalfOverlapIsOneThird) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0);
}

TEST(IouTest, IdenticalAndDisjoint) {
  EXPECT_EQ(iou({3, 4, 5, 6}, {3, 4, 5, 6}), 1.0);
  EXPECT_EQ(iou({0, 0, 5, 5}, {5, 0, 5, 5}), 0.0);
  EXPECT_EQ(iou({0, 0, 5, 5}, {20, 20, 2, 2}), 0.0);
}

TEST(IouTest, MatchesPixelCountingOracle) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pos(0, 40), side(1, 30);
  for (int i = 0; i < 100; ++i) {
    const BoundingBox a{pos(rng), pos(rng), side(rng), side(rng)};
    const BoundingBox b{pos(rng), pos(rng), side(rng), side(rng)};
    EXPECT_NEAR(iou(a, b), pixel_iou(a, b), 1e-9) << to_string(a) << " " << to_string(b);
    EXPECT_EQ(iou(a, b), iou(b, a));
  }
}

TEST(BoxTest, UnionAndIntersection) {
  EXPECT_EQ(bbox_union({0, 0, 2, 2}, {5, 6, 1, 1}), (BoundingBox{0, 0, 6, 7}));
  EXPECT_EQ(intersection_area({0, 0, 10, 10}, {5, 5, 10, 10}), 25);
  EXPECT_EQ(intersection_area({0, 0, 10, 10}, {10, 0, 5, 5}), 0);
  EXPECT_TRUE((BoundingBox{0, 0, 4, 4}).within(4, 4));
  EXPECT_FALSE((BoundingBox{1, 0, 4, 4}).within(4, 4));
}

}  // namespace
}  // namespace docspot
