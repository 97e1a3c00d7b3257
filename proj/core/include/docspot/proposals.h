#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "docspot/box.h"
#include "docspot/image.h"
#include "docspot/imgproc.h"
#include "docspot/segmentation.h"

namespace docspot {

inline constexpr int kColorBinsPerChannel = 25;
inline constexpr int kColorBins = 3 * kColorBinsPerChannel;
inline constexpr int kTextureOrientations = 8;
inline constexpr int kTextureBinsPerOrientation = 10;
inline constexpr int kTextureBins =
    3 * kTextureOrientations * kTextureBinsPerOrientation;

struct RegionNode {
  int id = 0;
  std::int64_t pixel_count = 0;
  BoundingBox bbox;
  std::array<float, kColorBins> color_hist{};
  std::array<float, kTextureBins> texture_hist{};
};

// Per-pixel bin assignments shared by all regions of one page.
struct RegionDescriptorMaps {
  int width = 0;
  int height = 0;
  // kColorBinsPerChannel bins per HSV channel, one entry per pixel and
  // channel: pixel * 3 + channel.
  std::vector<std::uint8_t> color_bin;
  // Texture bin index (already offset into the 240-bin layout) per
  // pixel, channel and orientation: (pixel * 3 + channel) * 8 + orientation.
  std::vector<std::uint16_t> texture_bin;
};

RegionDescriptorMaps compute_descriptor_maps(const Image& img);

// Builds the L1-normalized color and texture histograms and the bounding
// box of the given pixel set (row-major pixel indices).
RegionNode describe_region(const RegionDescriptorMaps& maps,
                           std::span<const int> pixels, int id = 0);

// Histograms of a merged region: pixel-count weighted average.
RegionNode merge_regions(const RegionNode& a, const RegionNode& b, int id);

struct SimilarityParts {
  double color = 0;
  double texture = 0;
  double size = 0;
  double fill = 0;
  double total() const { return color + texture + size + fill; }
};

// Color + texture + size + fill similarity, each part in [0, 1].
SimilarityParts similarity_parts(const RegionNode& a, const RegionNode& b,
                                 std::int64_t image_size);
double region_similarity(const RegionNode& a, const RegionNode& b,
                         std::int64_t image_size);

// Greedy hierarchical grouping: repeatedly merges the most similar pair of
// adjacent regions (ties by smaller ids) until one region is left. Returns
// the initial segment boxes followed by every merged box, in creation
// order, with duplicates removed (first occurrence kept).
std::vector<BoundingBox> selective_search(const SegmentLabels& seg,
                                          const Image& img);

struct FilterParams {
  double alpha = 0.06;
  int sector_count = 8;
  int min_side = 10;
  double max_side_frac = 0.9;
  EdgeParams edges;
};

enum class RegionVerdict {
  kValid,
  kLowEdgeDensity,    // Global edge mean below alpha.
  kTooManyEmptySectors,  // More than half of the sectors below alpha.
};

const char* to_string(RegionVerdict v);

// Invalid-region test on an edge image. Sectors are sector_count
// equal-width vertical strips, or horizontal strips when the image is
// narrower than sector_count pixels.
RegionVerdict classify_edge_image(const BinaryImage& edges, double alpha,
                                  int sector_count = 8);

// Edge-binarizes the crop and applies classify_edge_image.
bool filter_invalid_region(const Image& crop, const FilterParams& params);

bool size_filter(const BoundingBox& box, int page_w, int page_h,
                 const FilterParams& params);

struct ProposalStats {
  std::size_t raw = 0;
  std::size_t after_size = 0;
  std::size_t after_edges = 0;
};

struct ProposalResult {
  std::vector<BoundingBox> boxes;
  ProposalStats stats;
};

// selective_search -> size_filter -> filter_invalid_region, order kept.
ProposalResult propose(const Image& page, const SegmentParams& seg_params,
                       const FilterParams& params);

}  // namespace docspot
