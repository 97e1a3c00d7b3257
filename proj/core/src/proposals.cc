#include "docspot/proposals.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <string>

#include "docspot/error.h"

namespace docspot {

namespace {

// Directional derivative responses saturate at this value before binning.
constexpr double kTextureRange = 0.25;

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    h = 0.0;
    return;
  }
  double hh;
  if (mx == r) hh = (g - b) / d;
  else if (mx == g) hh = 2.0 + (b - r) / d;
  else hh = 4.0 + (r - g) / d;
  hh /= 6.0;
  if (hh < 0.0) hh += 1.0;
  h = hh;
}

std::uint8_t unit_bin(double v, int bins) {
  const int b = static_cast<int>(v * bins);
  return static_cast<std::uint8_t>(std::clamp(b, 0, bins - 1));
}

}  // namespace

RegionDescriptorMaps compute_descriptor_maps(const Image& img) {
  const Image rgb = gray_to_rgb(img);
  const int w = rgb.width(), h = rgb.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;

  RegionDescriptorMaps maps;
  maps.width = w;
  maps.height = h;
  maps.color_bin.resize(n * 3);
  maps.texture_bin.resize(n * 3 * kTextureOrientations);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double hue, sat, val;
      rgb_to_hsv(rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2), hue, sat, val);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      maps.color_bin[i * 3 + 0] = unit_bin(hue, kColorBinsPerChannel);
      maps.color_bin[i * 3 + 1] = unit_bin(sat, kColorBinsPerChannel);
      maps.color_bin[i * 3 + 2] = unit_bin(val, kColorBinsPerChannel);
    }
  }

  // Gaussian derivatives (sigma 1) in 8 orientations, positive part only.
  const Image smooth = gaussian_blur(rgb, 1.0);
  double cos_o[kTextureOrientations], sin_o[kTextureOrientations];
  for (int o = 0; o < kTextureOrientations; ++o) {
    const double theta = o * std::numbers::pi / 4.0;
    cos_o[o] = std::cos(theta);
    sin_o[o] = std::sin(theta);
  }
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, w - 1);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      for (int c = 0; c < 3; ++c) {
        const double gx = 0.5 * (smooth.at(x1, y, c) - smooth.at(x0, y, c));
        const double gy = 0.5 * (smooth.at(x, y1, c) - smooth.at(x, y0, c));
        for (int o = 0; o < kTextureOrientations; ++o) {
          const double d = std::max(0.0, gx * cos_o[o] + gy * sin_o[o]);
          const int bin = unit_bin(d / kTextureRange, kTextureBinsPerOrientation);
          maps.texture_bin[(i * 3 + c) * kTextureOrientations + o] = static_cast<std::uint16_t>(
              (c * kTextureOrientations + o) * kTextureBinsPerOrientation + bin);
        }
      }
    }
  }
  return maps;
}

RegionNode describe_region(const RegionDescriptorMaps& maps,
                           std::span<const int> pixels, int id) {
  if (pixels.empty()) fail(ErrorKind::kInvalidArgument, "region without pixels");
  RegionNode node;
  node.id = id;
  node.pixel_count = static_cast<std::int64_t>(pixels.size());
  std::array<double, kColorBins> color{};
  std::array<double, kTextureBins> texture{};
  int x0 = maps.width, y0 = maps.height, x1 = -1, y1 = -1;
  for (int p : pixels) {
    const int x = p % maps.width, y = p / maps.width;
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
    const auto base = static_cast<std::size_t>(p);
    for (int c = 0; c < 3; ++c)
      color[c * kColorBinsPerChannel + maps.color_bin[base * 3 + c]] += 1.0;
    for (int t = 0; t < 3 * kTextureOrientations; ++t)
      texture[maps.texture_bin[base * 3 * kTextureOrientations + t]] += 1.0;
  }
  node.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  const double n = static_cast<double>(pixels.size());
  for (int i = 0; i < kColorBins; ++i) node.color_hist[i] = static_cast<float>(color[i] / (3.0 * n));
  for (int i = 0; i < kTextureBins; ++i)
    node.texture_hist[i] = static_cast<float>(texture[i] / (3.0 * kTextureOrientations * n));
  return node;
}

RegionNode merge_regions(const RegionNode& a, const RegionNode& b, int id) {
  RegionNode m;
  m.id = id;
  m.pixel_count = a.pixel_count + b.pixel_count;
  m.bbox = bbox_union(a.bbox, b.bbox);
  const double wa = static_cast<double>(a.pixel_count) / m.pixel_count;
  const double wb = static_cast<double>(b.pixel_count) / m.pixel_count;
  for (int i = 0; i < kColorBins; ++i)
    m.color_hist[i] = static_cast<float>(wa * a.color_hist[i] + wb * b.color_hist[i]);
  for (int i = 0; i < kTextureBins; ++i)
    m.texture_hist[i] = static_cast<float>(wa * a.texture_hist[i] + wb * b.texture_hist[i]);
  return m;
}

SimilarityParts similarity_parts(const RegionNode& a, const RegionNode& b,
                                 std::int64_t image_size) {
  SimilarityParts s;
  for (int i = 0; i < kColorBins; ++i) s.color += std::min(a.color_hist[i], b.color_hist[i]);
  for (int i = 0; i < kTextureBins; ++i)
    s.texture += std::min(a.texture_hist[i], b.texture_hist[i]);
  s.color = std::clamp(s.color, 0.0, 1.0);
  s.texture = std::clamp(s.texture, 0.0, 1.0);
  const double total = static_cast<double>(std::max<std::int64_t>(image_size, 1));
  const double both = static_cast<double>(a.pixel_count + b.pixel_count);
  s.size = std::clamp(1.0 - both / total, 0.0, 1.0);
  const double slack = static_cast<double>(bbox_union(a.bbox, b.bbox).area()) - both;
  s.fill = std::clamp(1.0 - slack / total, 0.0, 1.0);
  return s;
}

double region_similarity(const RegionNode& a, const RegionNode& b,
                         std::int64_t image_size) {
  return similarity_parts(a, b, image_size).total();
}

namespace {

struct Candidate {
  double similarity;
  int a;  // a < b
  int b;
};

// Max-heap order: higher similarity first, then smaller ids.
struct CandidateLess {
  bool operator()(const Candidate& l, const Candidate& r) const {
    if (l.similarity != r.similarity) return l.similarity < r.similarity;
    if (l.a != r.a) return l.a > r.a;
    return l.b > r.b;
  }
};

}  // namespace

std::vector<BoundingBox> selective_search(const SegmentLabels& seg, const Image& img) {
  if (seg.width != img.width() || seg.height != img.height()) {
    fail(ErrorKind::kInvalidArgument, "segmentation and image sizes differ");
  }
  const int w = seg.width, h = seg.height;
  const std::int64_t image_size = static_cast<std::int64_t>(w) * h;
  const RegionDescriptorMaps maps = compute_descriptor_maps(img);

  std::vector<std::vector<int>> members(seg.segment_count);
  for (int i = 0; i < w * h; ++i) members[seg.labels[i]].push_back(i);

  std::vector<RegionNode> regions;
  regions.reserve(2 * seg.segment_count);
  for (int id = 0; id < seg.segment_count; ++id)
    regions.push_back(describe_region(maps, members[id], id));
  members.clear();

  std::vector<std::set<int>> neighbors(seg.segment_count);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = seg.at(x, y);
      static constexpr int kForward[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
      for (const auto& [dx, dy] : kForward) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || nx >= w || ny >= h) continue;
        const int b = seg.at(nx, ny);
        if (a != b) {
          neighbors[a].insert(b);
          neighbors[b].insert(a);
        }
      }
    }
  }

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess> queue;
  for (int a = 0; a < seg.segment_count; ++a) {
    for (int b : neighbors[a]) {
      if (a < b) queue.push({region_similarity(regions[a], regions[b], image_size), a, b});
    }
  }

  std::vector<bool> alive(seg.segment_count, true);
  while (!queue.empty()) {
    const Candidate top = queue.top();
    queue.pop();
    if (!alive[top.a] || !alive[top.b]) continue;
    const int t = static_cast<int>(regions.size());
    regions.push_back(merge_regions(regions[top.a], regions[top.b], t));
    alive[top.a] = alive[top.b] = false;
    alive.push_back(true);

    std::set<int> merged;
    for (int m : neighbors[top.a]) merged.insert(m);
    for (int m : neighbors[top.b]) merged.insert(m);
    merged.erase(top.a);
    merged.erase(top.b);
    neighbors[top.a].clear();
    neighbors[top.b].clear();
    for (int m : merged) {
      neighbors[m].erase(top.a);
      neighbors[m].erase(top.b);
      neighbors[m].insert(t);
      queue.push({region_similarity(regions[m], regions[t], image_size), m, t});
    }
    neighbors.push_back(std::move(merged));
  }

  std::vector<BoundingBox> out;
  std::set<BoundingBox> seen;
  for (const auto& r : regions) {
    if (seen.insert(r.bbox).second) out.push_back(r.bbox);
  }
  return out;
}

const char* to_string(RegionVerdict v) {
  switch (v) {
    case RegionVerdict::kValid: return "valid";
    case RegionVerdict::kLowEdgeDensity: return "low-edge-density";
    case RegionVerdict::kTooManyEmptySectors: return "too-many-empty-sectors";
  }
  return "unknown";
}

RegionVerdict classify_edge_image(const BinaryImage& edges, double alpha,
                                  int sector_count) {
  if (edges.empty()) fail(ErrorKind::kInvalidArgument, "empty edge image");
  if (sector_count < 1) fail(ErrorKind::kInvalidArgument, "sector_count must be >= 1");
  if (mean_intensity(edges) < alpha) return RegionVerdict::kLowEdgeDensity;

  const int w = edges.width(), h = edges.height();
  const bool vertical = w >= sector_count;
  // Too small in both axes for non-empty sectors: only the global test applies.
  if (!vertical && h < sector_count) return RegionVerdict::kValid;

  const int extent = vertical ? w : h;
  int invalid = 0;
  for (int s = 0; s < sector_count; ++s) {
    const int lo = static_cast<int>(static_cast<std::int64_t>(s) * extent / sector_count);
    const int hi = static_cast<int>(static_cast<std::int64_t>(s + 1) * extent / sector_count);
    const double m = vertical ? mean_intensity(edges, lo, 0, hi, h)
                              : mean_intensity(edges, 0, lo, w, hi);
    if (m < alpha) ++invalid;
    if (invalid > sector_count / 2) return RegionVerdict::kTooManyEmptySectors;
  }
  return RegionVerdict::kValid;
}

bool filter_invalid_region(const Image& crop, const FilterParams& params) {
  const BinaryImage edges = edge_binarize(ensure_grayscale(crop), params.edges);
  return classify_edge_image(edges, params.alpha, params.sector_count) ==
         RegionVerdict::kValid;
}

bool size_filter(const BoundingBox& box, int page_w, int page_h,
                 const FilterParams& params) {
  return box.w >= params.min_side && box.h >= params.min_side &&
         box.w <= params.max_side_frac * page_w &&
         box.h <= params.max_side_frac * page_h;
}

ProposalResult propose(const Image& page, const SegmentParams& seg_params,
                       const FilterParams& params) {
  const SegmentLabels seg = felzenszwalb_segment(page, seg_params);
  const std::vector<BoundingBox> raw = selective_search(seg, page);

  ProposalResult result;
  result.stats.raw = raw.size();
  for (const auto& box : raw) {
    if (!size_filter(box, page.width(), page.height(), params)) continue;
    ++result.stats.after_size;
    if (!filter_invalid_region(page.crop(box.x, box.y, box.w, box.h), params)) continue;
    result.boxes.push_back(box);
  }
  result.stats.after_edges = result.boxes.size();
  return result;
}

}  // namespace docspot
