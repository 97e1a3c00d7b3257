#include "docspot/segmentation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "docspot/error.h"
#include "docspot/imgproc.h"

namespace docspot {

DisjointSets::DisjointSets(int n)
    : parent_(n), rank_(n, 0), size_(n, 1), internal_(n, 0.0f), components_(n) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int DisjointSets::find(int x) {
  int root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const int next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

int DisjointSets::join(int a, int b, float weight) {
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  size_[a] += size_[b];
  internal_[a] = std::max({internal_[a], internal_[b], weight});
  --components_;
  return a;
}

namespace {

struct GraphEdge {
  float weight;
  int a;
  int b;
};

}  // namespace

SegmentLabels felzenszwalb_segment(const Image& img, const SegmentParams& params) {
  if (img.empty()) fail(ErrorKind::kInvalidArgument, "cannot segment an empty image");
  if (!(params.k > 0.0)) fail(ErrorKind::kInvalidArgument, "segmentation k must be > 0");
  if (params.min_size < 1) {
    fail(ErrorKind::kInvalidArgument, "segmentation min_size must be >= 1");
  }

  const int w = img.width(), h = img.height(), ch = img.channels();
  const Image smooth = gaussian_blur(img, params.sigma);
  auto value = [&](int i, int c) { return 255.0f * smooth.pixels()[static_cast<std::size_t>(i) * ch + c]; };
  auto dist = [&](int a, int b) {
    float acc = 0.0f;
    for (int c = 0; c < ch; ++c) {
      const float d = value(a, c) - value(b, c);
      acc += d * d;
    }
    return std::sqrt(acc);
  };

  std::vector<GraphEdge> edges;
  edges.reserve(static_cast<std::size_t>(w) * h * 4);
  static constexpr int kForward[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = y * w + x;
      for (const auto& [dx, dy] : kForward) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || nx >= w || ny >= h) continue;
        const int b = ny * w + nx;
        edges.push_back({dist(a, b), a, b});
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const GraphEdge& l, const GraphEdge& r) {
    if (l.weight != r.weight) return l.weight < r.weight;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  });

  const int n = w * h;
  DisjointSets sets(n);
  const auto k = static_cast<float>(params.k);
  std::vector<float> threshold(n, k);
  for (const auto& e : edges) {
    int a = sets.find(e.a);
    int b = sets.find(e.b);
    if (a == b) continue;
    if (e.weight <= threshold[a] && e.weight <= threshold[b]) {
      const int root = sets.join(a, b, e.weight);
      threshold[root] = e.weight + k / static_cast<float>(sets.size(root));
    }
  }
  for (const auto& e : edges) {
    const int a = sets.find(e.a);
    const int b = sets.find(e.b);
    if (a != b && (sets.size(a) < params.min_size || sets.size(b) < params.min_size)) {
      sets.join(a, b, e.weight);
    }
  }

  SegmentLabels out;
  out.width = w;
  out.height = h;
  out.labels.assign(n, -1);
  std::vector<int> relabel(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = sets.find(i);
    if (relabel[root] < 0) relabel[root] = next++;
    out.labels[i] = relabel[root];
  }
  out.segment_count = next;
  return out;
}

SegmentLabels felzenszwalb_segment(const Image& img, double k, int min_size) {
  SegmentParams p;
  p.k = k;
  p.min_size = min_size;
  return felzenszwalb_segment(img, p);
}

}  // namespace docspot
