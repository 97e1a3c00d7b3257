#pragma once

#include <cstdint>
#include <string>

namespace docspot {

// Axis-aligned region in pixel units; (x, y) is the top-left pixel.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
  int right() const { return x + w; }
  int bottom() const { return y + h; }

  bool valid() const { return w >= 1 && h >= 1; }
  bool within(int page_w, int page_h) const {
    return x >= 0 && y >= 0 && right() <= page_w && bottom() <= page_h;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

BoundingBox bbox_union(const BoundingBox& a, const BoundingBox& b);
std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b);

// Intersection over union by area; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

std::string to_string(const BoundingBox& b);

}  // namespace docspot
