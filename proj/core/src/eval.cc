#include "docspot/eval.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "docspot/error.h"
#include "json.hpp"

namespace docspot {

using json = nlohmann::ordered_json;

namespace {

BoundingBox parse_bbox(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    fail(ErrorKind::kDataError, where + ": bbox must be [x, y, w, h]");
  }
  BoundingBox b{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  if (!b.valid() || b.x < 0 || b.y < 0) {
    fail(ErrorKind::kDataError, where + ": invalid bbox " + to_string(b));
  }
  return b;
}

json bbox_json(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

const GroundTruthQuery& require_query(const GroundTruth& gt, const std::string& id) {
  const GroundTruthQuery* q = gt.find(id);
  if (!q) fail(ErrorKind::kDataError, "query '" + id + "' is missing from the ground truth");
  return *q;
}

void finish_report(EvalReport& report) {
  report.map.assign(report.cutoffs.size(), 0.0);
  if (report.per_query.empty()) return;
  for (const auto& q : report.per_query)
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) report.map[c] += q.ap[c];
  for (double& m : report.map) m /= static_cast<double>(report.per_query.size());
}

void check_cutoffs(std::span<const std::size_t> cutoffs) {
  if (cutoffs.empty()) fail(ErrorKind::kInvalidArgument, "at least one cutoff is required");
  for (std::size_t n : cutoffs)
    if (n == 0) fail(ErrorKind::kInvalidArgument, "cutoffs must be >= 1");
}

}  // namespace

const GroundTruthQuery* GroundTruth::find(std::string_view id) const {
  for (const auto& q : queries)
    if (q.id == id) return &q;
  return nullptr;
}

GroundTruth parse_ground_truth(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kDataError, "cannot parse ground truth: " + std::string(e.what()));
  }
  GroundTruth gt;
  try {
    const auto& queries = doc.at("queries");
    if (!queries.is_array()) fail(ErrorKind::kDataError, "ground truth 'queries' must be an array");
    std::set<std::string> ids;
    for (const auto& q : queries) {
      GroundTruthQuery out;
      out.id = q.at("id").get<std::string>();
      if (!ids.insert(out.id).second) {
        fail(ErrorKind::kDataError, "duplicate ground-truth query id '" + out.id + "'");
      }
      out.page = q.at("page").get<std::string>();
      out.bbox = parse_bbox(q.at("bbox"), "query " + out.id);
      for (const auto& o : q.at("occurrences")) {
        out.occurrences.push_back(
            {o.at("page").get<std::string>(), parse_bbox(o.at("bbox"), "query " + out.id)});
      }
      gt.queries.push_back(std::move(out));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kDataError, "malformed ground truth: " + std::string(e.what()));
  }
  return gt;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open ground truth " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ground_truth(ss.str());
}

std::string ground_truth_to_json(const GroundTruth& gt) {
  json queries = json::array();
  for (const auto& q : gt.queries) {
    json occ = json::array();
    for (const auto& o : q.occurrences) occ.push_back({{"page", o.page}, {"bbox", bbox_json(o.bbox)}});
    queries.push_back(
        {{"id", q.id}, {"page", q.page}, {"bbox", bbox_json(q.bbox)}, {"occurrences", occ}});
  }
  json doc;
  doc["queries"] = std::move(queries);
  return doc.dump(1) + "\n";
}

std::optional<double> average_precision(std::span<const bool> ranked_rel,
                                        std::size_t total_relevant) {
  if (total_relevant == 0) return std::nullopt;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranked_rel.size(); ++k) {
    if (!ranked_rel[k]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(total_relevant);
}

std::optional<double> average_precision(std::initializer_list<bool> ranked_rel,
                                        std::size_t total_relevant) {
  const std::vector<bool> v(ranked_rel);
  std::unique_ptr<bool[]> buf(new bool[v.size()]);
  for (std::size_t i = 0; i < v.size(); ++i) buf[i] = v[i];
  return average_precision(std::span<const bool>(buf.get(), v.size()), total_relevant);
}

const char* to_string(Task task) {
  return task == Task::kImageRetrieval ? "ir" : "ps";
}

Task parse_task(std::string_view name) {
  if (name == "ir") return Task::kImageRetrieval;
  if (name == "ps") return Task::kPatternSpotting;
  fail(ErrorKind::kInvalidArgument, "unknown task '" + std::string(name) + "' (expected ir or ps)");
}

EvalReport eval_ir(std::span<const QueryRun> runs, const GroundTruth& gt,
                   std::span<const std::size_t> cutoffs) {
  check_cutoffs(cutoffs);
  EvalReport report;
  report.task = Task::kImageRetrieval;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  for (const auto& run : runs) {
    const auto& q = require_query(gt, run.query_id);
    std::set<std::string> relevant;
    for (const auto& o : q.occurrences) relevant.insert(o.page);
    if (relevant.empty()) {
      report.excluded.push_back(run.query_id);
      continue;
    }
    const auto pages = ir_page_list(run.results);
    QueryAp ap{run.query_id, {}};
    for (std::size_t n : cutoffs) {
      const std::size_t m = std::min(n, pages.size());
      std::unique_ptr<bool[]> rel(new bool[m]);
      for (std::size_t k = 0; k < m; ++k) rel[k] = relevant.count(pages[k]) > 0;
      ap.ap.push_back(*average_precision(std::span<const bool>(rel.get(), m), relevant.size()));
    }
    report.per_query.push_back(std::move(ap));
  }
  finish_report(report);
  return report;
}

EvalReport eval_ps(std::span<const QueryRun> runs, const GroundTruth& gt,
                   std::span<const std::size_t> cutoffs, double iou_thresh) {
  check_cutoffs(cutoffs);
  EvalReport report;
  report.task = Task::kPatternSpotting;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  for (const auto& run : runs) {
    const auto& q = require_query(gt, run.query_id);
    if (q.occurrences.empty()) {
      report.excluded.push_back(run.query_id);
      continue;
    }
    QueryAp ap{run.query_id, {}};
    for (std::size_t n : cutoffs) {
      const std::size_t m = std::min(n, run.results.size());
      std::vector<bool> matched(q.occurrences.size(), false);
      std::unique_ptr<bool[]> rel(new bool[m]);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& r = run.results[k];
        std::size_t best = q.occurrences.size();
        double best_iou = -1.0;
        for (std::size_t o = 0; o < q.occurrences.size(); ++o) {
          if (matched[o] || q.occurrences[o].page != r.page_id) continue;
          const double v = iou(r.bbox, q.occurrences[o].bbox);
          if (v >= iou_thresh && v > best_iou) {
            best = o;
            best_iou = v;
          }
        }
        rel[k] = best < q.occurrences.size();
        if (rel[k]) matched[best] = true;
      }
      ap.ap.push_back(
          *average_precision(std::span<const bool>(rel.get(), m), q.occurrences.size()));
    }
    report.per_query.push_back(std::move(ap));
  }
  finish_report(report);
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json doc;
  doc["task"] = to_string(report.task);
  doc["mode"] = report.mode;
  doc["postprocessed"] = report.postprocessed;
  doc["cutoffs"] = report.cutoffs;
  json map = json::object();
  for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
    map[std::to_string(report.cutoffs[c])] = report.map[c];
  }
  doc["map"] = std::move(map);
  json per = json::array();
  for (const auto& q : report.per_query) per.push_back({{"id", q.query_id}, {"ap", q.ap}});
  doc["per_query"] = std::move(per);
  doc["excluded"] = report.excluded;
  if (report.timing) {
    doc["timing"] = {{"queries", report.timing->queries},
                     {"scan_mean_ms", report.timing->scan_mean_ms},
                     {"scan_stddev_ms", report.timing->scan_stddev_ms},
                     {"extract_mean_ms", report.timing->extract_mean_ms},
                     {"extract_stddev_ms", report.timing->extract_stddev_ms}};
  }
  return doc.dump(2) + "\n";
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  char buf[64];
  out << "task  mode       pp ";
  for (std::size_t n : report.cutoffs) {
    std::snprintf(buf, sizeof(buf), " %9s", ("top-" + std::to_string(n)).c_str());
    out << buf;
  }
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%-5s %-10s %-3s", report.task == Task::kImageRetrieval ? "IR" : "PS",
                report.mode.c_str(), report.postprocessed ? "yes" : "no");
  out << buf;
  for (double m : report.map) {
    std::snprintf(buf, sizeof(buf), " %9.4f", m);
    out << buf;
  }
  out << "\n";
  return out.str();
}

MeanStd mean_stddev(std::span<const double> samples) {
  MeanStd r;
  if (samples.empty()) return r;
  for (double s : samples) r.mean += s;
  r.mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - r.mean) * (s - r.mean);
  r.stddev = std::sqrt(var / static_cast<double>(samples.size()));
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0, Clock::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

TimingStats summarize(const std::vector<double>& scan, const std::vector<double>& extract) {
  TimingStats t;
  t.queries = scan.size();
  const auto s = mean_stddev(scan);
  const auto e = mean_stddev(extract);
  t.scan_mean_ms = s.mean;
  t.scan_stddev_ms = s.stddev;
  t.extract_mean_ms = e.mean;
  t.extract_stddev_ms = e.stddev;
  return t;
}

}  // namespace

TimingStats benchmark(const SearchIndex& index, std::span<const Image> queries,
                      DistanceMode mode, std::size_t n, int workers) {
  if (queries.empty()) fail(ErrorKind::kInvalidArgument, "benchmark needs at least one query");
  std::vector<double> scan, extract;
  for (const auto& img : queries) {
    const auto t0 = Clock::now();
    const FeatureVector v = extract_baseline(img);
    const auto t1 = Clock::now();
    const auto results = query(index, v, mode, n, workers);
    const auto t2 = Clock::now();
    if (results.empty()) fail(ErrorKind::kInternal, "benchmark query returned nothing");
    extract.push_back(ms_since(t0, t1));
    scan.push_back(ms_since(t1, t2));
  }
  return summarize(scan, extract);
}

TimingStats benchmark(const SearchIndex& index, std::span<const FeatureVector> queries,
                      DistanceMode mode, std::size_t n, int workers) {
  if (queries.empty()) fail(ErrorKind::kInvalidArgument, "benchmark needs at least one query");
  std::vector<double> scan, extract;
  for (const auto& v : queries) {
    const auto t0 = Clock::now();
    const auto results = query(index, v, mode, n, workers);
    const auto t1 = Clock::now();
    if (results.empty()) fail(ErrorKind::kInternal, "benchmark query returned nothing");
    scan.push_back(ms_since(t0, t1));
    extract.push_back(0.0);
  }
  return summarize(scan, extract);
}

}  // namespace docspot
