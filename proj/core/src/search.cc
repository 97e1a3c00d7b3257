#include "docspot/search.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>

#include "docspot/error.h"
#include "parallel.h"

namespace docspot {

const char* to_string(DistanceMode mode) {
  return mode == DistanceMode::kEuclidean ? "euclidean" : "hamming";
}

DistanceMode parse_mode(std::string_view name) {
  if (name == "euclidean") return DistanceMode::kEuclidean;
  if (name == "hamming") return DistanceMode::kHamming;
  fail(ErrorKind::kInvalidArgument,
       "unknown distance mode '" + std::string(name) + "' (expected euclidean or hamming)");
}

void euclidean_scan(std::span<const float> store, std::size_t dims,
                    std::span<const float> query, std::span<float> out) {
  const std::size_t rows = out.size();
  const float* q = query.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const float* v = store.data() + r * dims;
    // Eight independent partial sums so the loop vectorizes without
    // reassociation flags; the result is still fully deterministic.
    float acc[8] = {};
    std::size_t d = 0;
    for (; d + 8 <= dims; d += 8) {
      for (int k = 0; k < 8; ++k) {
        const float diff = v[d + k] - q[d + k];
        acc[k] += diff * diff;
      }
    }
    for (; d < dims; ++d) {
      const float diff = v[d] - q[d];
      acc[0] += diff * diff;
    }
    out[r] = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  }
}

void hamming_scan(std::span<const std::uint64_t> store, std::size_t words,
                  std::span<const std::uint64_t> query, std::span<std::uint32_t> out) {
  const std::size_t rows = out.size();
  const std::uint64_t* q = query.data();
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = hamming_words(store.data() + r * words, q, words);
  }
}

FeatureVector prepare_query(const SearchIndex& index, FeatureVector query) {
  if (query.dims() != index.dims()) {
    fail(ErrorKind::kProfileMismatch,
         "query has " + std::to_string(query.dims()) + " dims, index profile '" +
             index.profile().name + "' has " + std::to_string(index.dims()));
  }
  if (index.normalized()) l2_normalize_inplace(query.values);
  return query;
}

namespace {

template <typename D>
struct Scored {
  D distance;
  std::uint64_t region_id;
  std::size_t row;
};

template <typename D>
bool scored_less(const Scored<D>& a, const Scored<D>& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.region_id < b.region_id;
}

// Scans rows [begin, end) and keeps the n best of the shard.
template <typename D, typename ScanFn>
std::vector<Scored<D>> scan_shard(const SearchIndex& index, std::size_t begin,
                                  std::size_t end, std::size_t n, ScanFn&& scan) {
  std::vector<D> dist(end - begin);
  scan(begin, std::span<D>(dist));
  const std::size_t keep = std::min(n, dist.size());
  if (keep == 0) return {};
  // Only rows at or below the keep-th smallest distance can make the cut;
  // ties at the cutoff are all kept so region-id tie breaking stays exact.
  D cutoff{};
  if constexpr (std::is_integral_v<D>) {
    // Hamming distances are bounded by the code length, so a histogram
    // finds the cutoff in one pass without copying.
    const D top = *std::max_element(dist.begin(), dist.end());
    std::vector<std::size_t> hist(static_cast<std::size_t>(top) + 1, 0);
    for (D d : dist) ++hist[d];
    std::size_t seen = 0;
    while ((seen += hist[cutoff]) < keep) ++cutoff;
  } else {
    std::vector<D> sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + (keep - 1), sorted.end());
    cutoff = sorted[keep - 1];
  }
  std::vector<Scored<D>> scored;
  scored.reserve(keep);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > cutoff) continue;
    scored.push_back({dist[i], index.entries()[begin + i].region_id, begin + i});
  }
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), scored_less<D>);
  scored.resize(keep);
  return scored;
}

template <typename D, typename ScanFn>
std::vector<Scored<D>> ranked(const SearchIndex& index, std::size_t n, int workers,
                              ScanFn&& scan) {
  const std::size_t rows = index.size();
  const std::size_t shards =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, rows);
  std::vector<std::vector<Scored<D>>> partial(shards);
  internal::parallel_for(shards, static_cast<int>(shards), [&](std::size_t s) {
    const std::size_t begin = rows * s / shards;
    const std::size_t end = rows * (s + 1) / shards;
    partial[s] = scan_shard<D>(index, begin, end, n, scan);
  });
  if (shards == 1) return std::move(partial[0]);
  std::vector<Scored<D>> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  const std::size_t keep = std::min(n, merged.size());
  std::partial_sort(merged.begin(), merged.begin() + keep, merged.end(), scored_less<D>);
  merged.resize(keep);
  return merged;
}

template <typename D, typename ToDistance>
std::vector<QueryResult> to_results(const SearchIndex& index,
                                    const std::vector<Scored<D>>& scored,
                                    ToDistance&& to_distance) {
  std::vector<QueryResult> out;
  out.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto& e = index.entries()[scored[i].row];
    out.push_back({e.region_id, e.page_id, e.bbox, to_distance(scored[i].distance),
                   static_cast<int>(i + 1)});
  }
  return out;
}

}  // namespace

std::vector<QueryResult> query(const SearchIndex& index, const FeatureVector& query_vector,
                               DistanceMode mode, std::size_t n, int workers) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "n must be >= 1");
  if (index.empty()) fail(ErrorKind::kEmptyIndex, "query against an empty index");
  const FeatureVector q = prepare_query(index, query_vector);

  if (mode == DistanceMode::kEuclidean) {
    const std::size_t dims = index.dims();
    auto scan = [&](std::size_t begin, std::span<float> out) {
      euclidean_scan(index.features().subspan(begin * dims, out.size() * dims), dims, q.values,
                     out);
    };
    const auto best = ranked<float>(index, n, workers, scan);
    return to_results(index, best, [](float sq) { return std::sqrt(static_cast<double>(sq)); });
  }

  const BinaryCode code = binarize(q, index.binarizer());
  const std::size_t words = index.code_words();
  auto scan = [&](std::size_t begin, std::span<std::uint32_t> out) {
    hamming_scan(index.codes().subspan(begin * words, out.size() * words), words, code.words,
                 out);
  };
  const auto best = ranked<std::uint32_t>(index, n, workers, scan);
  return to_results(index, best, [](std::uint32_t d) { return static_cast<double>(d); });
}

std::vector<QueryResult> query(const SearchIndex& index, const Image& query_img,
                               DistanceMode mode, std::size_t n, int workers) {
  if (index.profile().kind != ExtractorKind::kBuiltinBaseline) {
    fail(ErrorKind::kProfileMismatch,
         "index profile '" + index.profile().name +
             "' uses external features; pass a precomputed query vector");
  }
  return query(index, extract_baseline(query_img), mode, n, workers);
}

std::vector<QueryResult> postprocess_union(std::span<const QueryResult> results,
                                           const PostProcessParams& params) {
  if (!(params.union_iou > 0.0 && params.union_iou < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "union_iou must lie in (0, 1)");
  }
  const std::size_t pool = std::min(params.pool_size, results.size());
  std::unordered_map<std::string, std::vector<BoundingBox>> kept_by_page;
  std::vector<QueryResult> kept;
  for (std::size_t i = 0; i < pool; ++i) {
    const QueryResult& r = results[i];
    auto& boxes = kept_by_page[r.page_id];
    const bool duplicate = std::any_of(boxes.begin(), boxes.end(), [&](const BoundingBox& b) {
      return iou(b, r.bbox) > params.union_iou;
    });
    if (duplicate) continue;
    boxes.push_back(r.bbox);
    kept.push_back(r);
    kept.back().rank = static_cast<int>(kept.size());
  }
  return kept;
}

std::vector<std::string> ir_page_list(std::span<const QueryResult> results) {
  std::vector<std::string> pages;
  std::unordered_set<std::string> seen;
  for (const auto& r : results) {
    if (seen.insert(r.page_id).second) pages.push_back(r.page_id);
  }
  return pages;
}

}  // namespace docspot
