#pragma once

#include <span>
#include <vector>

#include "docspot/image.h"

namespace docspot {

struct SegmentLabels {
  int width = 0;
  int height = 0;
  int segment_count = 0;
  // Row-major, values in [0, segment_count).
  std::vector<int> labels;

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct SegmentParams {
  // Scale parameter on the 0..255 color scale used by the reference
  // implementation of the algorithm.
  double k = 200.0;
  int min_size = 50;
  // Pre-smoothing; 0 disables it.
  double sigma = 0.8;
};

// Felzenszwalb-Huttenlocher graph segmentation over the 8-connected pixel
// grid. Edge weights are Euclidean RGB distances (absolute difference for
// gray input) on a 0..255 scale. Edges are processed by ascending weight,
// ties by ascending (pixel index, neighbor index). Labels are numbered in
// raster order of each segment's first pixel.
SegmentLabels felzenszwalb_segment(const Image& img, const SegmentParams& params);
SegmentLabels felzenszwalb_segment(const Image& img, double k, int min_size);

// Disjoint-set forest with union by rank, tracking component sizes and the
// internal difference Int(C) of each component.
class DisjointSets {
 public:
  explicit DisjointSets(int n);

  int find(int x);
  // Joins the roots a and b; returns the surviving root.
  int join(int a, int b, float weight);

  int size(int root) const { return size_[root]; }
  float internal(int root) const { return internal_[root]; }
  int components() const { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  std::vector<int> size_;
  std::vector<float> internal_;
  int components_;
};

}  // namespace docspot
