#include "docspot/box.h"

#include <algorithm>

namespace docspot {

BoundingBox bbox_union(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.right(), b.right());
  const int y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t w =
      std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const std::int64_t h =
      std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string to_string(const BoundingBox& b) {
  return "[" + std::to_string(b.x) + "," + std::to_string(b.y) + "," +
         std::to_string(b.w) + "," + std::to_string(b.h) + "]";
}

}  // namespace docspot
