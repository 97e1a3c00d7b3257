#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docspot/box.h"
#include "docspot/features.h"
#include "docspot/image.h"
#include "docspot/index.h"

namespace docspot {

enum class DistanceMode { kEuclidean, kHamming };

const char* to_string(DistanceMode mode);
DistanceMode parse_mode(std::string_view name);

struct QueryResult {
  std::uint64_t region_id = 0;
  std::string page_id;
  BoundingBox bbox;
  // Euclidean distance, or the integral Hamming distance.
  double distance = 0.0;
  int rank = 0;  // 1-based

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

struct PostProcessParams {
  std::size_t pool_size = 3000;
  double union_iou = 0.85;
};

// Prepares a query descriptor the way the index expects it: normalized
// when the index is, and checked against the index dims.
FeatureVector prepare_query(const SearchIndex& index, FeatureVector query);

// Full scan over the index; returns the n nearest entries sorted by
// (distance, region_id). `workers` > 1 shards the scan.
std::vector<QueryResult> query(const SearchIndex& index,
                               const FeatureVector& query_vector,
                               DistanceMode mode, std::size_t n,
                               int workers = 1);

// Baseline-profile convenience: extracts the query image first.
std::vector<QueryResult> query(const SearchIndex& index, const Image& query_img,
                               DistanceMode mode, std::size_t n,
                               int workers = 1);

// Greedy suppression in rank order over the first pool_size results: a
// result is dropped when its IoU with an already kept result on the same
// page exceeds union_iou. Ranks are renumbered 1..m.
std::vector<QueryResult> postprocess_union(std::span<const QueryResult> results,
                                           const PostProcessParams& params);

// Pages in order of first occurrence.
std::vector<std::string> ir_page_list(std::span<const QueryResult> results);

// Raw scan kernels, exposed for benchmarking: distances from one query to
// all rows of a store. Euclidean writes squared distances.
void euclidean_scan(std::span<const float> store, std::size_t dims,
                    std::span<const float> query, std::span<float> out);
void hamming_scan(std::span<const std::uint64_t> store, std::size_t words,
                  std::span<const std::uint64_t> query,
                  std::span<std::uint32_t> out);

}  // namespace docspot
