#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docspot/box.h"
#include "docspot/features.h"
#include "docspot/image.h"
#include "docspot/index.h"
#include "docspot/search.h"

namespace docspot {

struct Occurrence {
  std::string page;
  BoundingBox bbox;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

struct GroundTruthQuery {
  std::string id;
  std::string page;
  BoundingBox bbox;
  std::vector<Occurrence> occurrences;

  friend bool operator==(const GroundTruthQuery&, const GroundTruthQuery&) = default;
};

struct GroundTruth {
  std::vector<GroundTruthQuery> queries;

  const GroundTruthQuery* find(std::string_view id) const;
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// {"queries": [{"id", "page", "bbox": [x,y,w,h],
//               "occurrences": [{"page", "bbox": [x,y,w,h]}]}]}
GroundTruth parse_ground_truth(std::string_view json_text);
GroundTruth load_ground_truth(const std::filesystem::path& path);
std::string ground_truth_to_json(const GroundTruth& gt);

// Non-interpolated AP: sum of precision@k over relevant hits, divided by
// total_relevant. Returns nullopt when total_relevant is 0 (the query is
// left out of the mean).
std::optional<double> average_precision(std::span<const bool> ranked_rel,
                                        std::size_t total_relevant);
std::optional<double> average_precision(std::initializer_list<bool> ranked_rel,
                                        std::size_t total_relevant);

enum class Task { kImageRetrieval, kPatternSpotting };

const char* to_string(Task task);
Task parse_task(std::string_view name);

inline constexpr std::size_t kDefaultCutoffs[] = {100, 300, 500, 700, 1000};

struct QueryRun {
  std::string query_id;
  std::vector<QueryResult> results;  // Sorted by rank.
};

struct QueryAp {
  std::string query_id;
  std::vector<double> ap;  // One per cutoff.
};

struct TimingStats {
  std::size_t queries = 0;
  double scan_mean_ms = 0;
  double scan_stddev_ms = 0;
  double extract_mean_ms = 0;
  double extract_stddev_ms = 0;
};

struct EvalReport {
  Task task = Task::kImageRetrieval;
  std::string mode;
  bool postprocessed = false;
  std::vector<std::size_t> cutoffs;
  std::vector<double> map;  // One per cutoff.
  std::vector<QueryAp> per_query;
  std::vector<std::string> excluded;  // Queries without relevant items.
  std::optional<TimingStats> timing;
};

std::string report_to_json(const EvalReport& report);
// Plain-text table: one header row of cutoffs, one row of mAP values.
std::string report_table(const EvalReport& report);

// Image retrieval: the page list of each run (first-occurrence order) is
// cut at n; a page is relevant when it hosts at least one occurrence.
EvalReport eval_ir(std::span<const QueryRun> runs, const GroundTruth& gt,
                   std::span<const std::size_t> cutoffs);

// Pattern spotting: results are scanned in rank order up to n; a result is
// a hit when its IoU with a still-unmatched occurrence on the same page is
// >= iou_thresh (best IoU wins, each occurrence matched once).
EvalReport eval_ps(std::span<const QueryRun> runs, const GroundTruth& gt,
                   std::span<const std::size_t> cutoffs,
                   double iou_thresh = 0.5);

// Mean and population standard deviation of per-query wall-clock times of
// the scan + sort step, with extraction timed separately.
TimingStats benchmark(const SearchIndex& index, std::span<const Image> queries,
                      DistanceMode mode, std::size_t n = 1000, int workers = 1);
TimingStats benchmark(const SearchIndex& index,
                      std::span<const FeatureVector> queries, DistanceMode mode,
                      std::size_t n = 1000, int workers = 1);

struct MeanStd {
  double mean = 0;
  double stddev = 0;
};
MeanStd mean_stddev(std::span<const double> samples);

}  // namespace docspot
