#include "cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "docspot/error.h"
#include "docspot/eval.h"
#include "docspot/features.h"
#include "docspot/image_io.h"
#include "docspot/imgproc.h"
#include "docspot/index.h"
#include "docspot/search.h"
#include "docspot/synth.h"
#include "json.hpp"

namespace docspot::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

int default_workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct IndexOptions {
  std::string pages_dir;
  std::string out_dir;
  std::string profile = "baseline";
  std::string features_file;
  std::string proposals_report;
  std::string manifest_out;
  bool propose_only = false;
  bool no_normalize = false;
  BuildConfig build;
};

struct QueryOptions {
  std::string index_dir;
  std::vector<std::string> query_images;
  std::string query_features;
  std::string mode = "hamming";
  int n = 100;
  bool pp = false;
  PostProcessParams post;
  std::string out_file;
  std::string overlay_dir;
  int overlay_top = 5;
  int workers = default_workers();
};

struct EvalOptions {
  std::string index_dir;
  std::string gt_file;
  std::string task = "ps";
  std::string mode = "hamming";
  std::vector<std::size_t> cutoffs{std::begin(kDefaultCutoffs), std::end(kDefaultCutoffs)};
  bool pp = false;
  PostProcessParams post;
  double iou_thresh = 0.5;
  std::string pages_dir;
  std::string query_features;
  std::string out_file;
  int workers = default_workers();
};

struct BenchOptions {
  std::string index_dir;
  std::string queries_dir;
  std::string gt_file;
  std::string pages_dir;
  std::string query_features;
  std::vector<std::string> modes{"euclidean", "hamming"};
  int n = 1000;
  int workers = 1;
};

struct SynthOptions {
  std::string out_dir;
  SynthSpec spec;
};

// Invalid parameter combinations that CLI11 validators cannot express.
[[noreturn]] void usage_error(const std::string& what) {
  throw CLI::ValidationError(what);
}

void add_config(CLI::App* cmd) {
  cmd->set_config("--config", "", "TOML-style file with option defaults; flags win")
      ->check(CLI::ExistingFile);
}

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::kIoError, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<PageInput> load_pages(const fs::path& dir) {
  std::vector<PageInput> pages;
  std::set<std::string> ids;
  for (const auto& path : list_images(dir)) {
    const std::string id = path.stem().string();
    if (!ids.insert(id).second) fail(ErrorKind::kDataError, "duplicate page id '" + id + "'");
    pages.push_back({id, load_image(path), path.string()});
  }
  if (pages.empty()) fail(ErrorKind::kDataError, "no PNG or JPEG pages in " + dir.string());
  return pages;
}

ExtractorProfile resolve_profile(const std::string& name) {
  const auto p = find_profile(name);
  if (!p) {
    std::string known;
    for (const auto& k : known_profiles()) known += (known.empty() ? "" : ", ") + k.name;
    usage_error("--profile: unknown profile '" + name + "' (known: " + known + ")");
  }
  return *p;
}

std::string percent_drop(std::size_t from, std::size_t to) {
  if (from == 0) return "0.0%";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * (1.0 - static_cast<double>(to) / from));
  return buf;
}

int cmd_index(const IndexOptions& opt, std::ostream& out) {
  BuildConfig config = opt.build;
  config.profile = resolve_profile(opt.profile);
  config.normalize = !opt.no_normalize;
  if (config.filter.edges.low > config.filter.edges.high) {
    usage_error("--canny-low must not exceed --canny-high");
  }
  const bool external = config.profile.kind == ExtractorKind::kExternal;
  if (!opt.propose_only && external && opt.features_file.empty()) {
    usage_error("--features is required for profile '" + config.profile.name + "'");
  }
  if (!external && !opt.features_file.empty()) {
    usage_error("--features needs an external --profile");
  }
  if (!opt.propose_only && opt.out_dir.empty()) usage_error("--out is required");

  const auto pages = load_pages(opt.pages_dir);

  auto print_report = [&](const BuildReport& report) {
    const auto& t = report.total;
    out << "pages: " << report.pages.size() << "\n"
        << "proposals: raw " << t.raw << ", after size filter " << t.after_size << " (-"
        << percent_drop(t.raw, t.after_size) << "), after edge filter " << t.after_edges
        << " (-" << percent_drop(t.after_size, t.after_edges) << ")\n";
    if (!opt.proposals_report.empty()) {
      std::ofstream f(opt.proposals_report, std::ios::trunc);
      if (!f) fail(ErrorKind::kIoError, "cannot write " + opt.proposals_report);
      for (const auto& p : report.pages) {
        f << json{{"page", p.page_id},
                  {"raw", p.stats.raw},
                  {"after_size", p.stats.after_size},
                  {"after_edges", p.stats.after_edges}}
                 .dump()
          << "\n";
      }
    }
  };
  auto write_manifest = [&](const ProposalSet& set) {
    if (opt.manifest_out.empty()) return;
    std::map<std::string, std::string> path_of;
    for (const auto& p : set.pages) path_of[p.id] = p.path;
    std::ofstream f(opt.manifest_out, std::ios::trunc);
    if (!f) fail(ErrorKind::kIoError, "cannot write " + opt.manifest_out);
    f << "region_id,image_path,x,y,w,h\n";
    for (const auto& e : set.entries) {
      f << e.region_id << "," << path_of[e.page_id] << "," << e.bbox.x << "," << e.bbox.y << ","
        << e.bbox.w << "," << e.bbox.h << "\n";
    }
  };

  if (opt.propose_only || !opt.manifest_out.empty()) {
    const ProposalSet set = propose_pages(pages, config);
    write_manifest(set);
    if (opt.propose_only) {
      print_report(set.report);
      out << "candidates: " << set.entries.size() << "\n";
      return kExitOk;
    }
  }

  std::optional<FeatureFile> features;
  if (external) {
    // Loads through the profile check so a dims mismatch is reported as such.
    load_external_features(opt.features_file, config.profile);
    features = read_feature_file(opt.features_file);
  }
  BuildReport report;
  SearchIndex index;
  try {
    index = build_index(pages, config, features ? &*features : nullptr, &report);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kEmptyIndex) print_report(report);
    throw;
  }
  print_report(report);
  index.save(opt.out_dir);
  const auto storage = storage_report(index);
  out << "index: " << index.size() << " entries, " << index.dims() << " dims ("
      << index.profile().name << "), float " << storage.float_bytes << " B, binary "
      << storage.binary_bytes << " B\n"
      << "written to " << opt.out_dir << "\n";
  return kExitOk;
}

struct NamedQuery {
  std::string id;
  FeatureVector vector;
};

std::vector<NamedQuery> vectors_from_file(const std::string& path, const SearchIndex& index) {
  const auto records = load_external_features(path, index.profile());
  std::vector<NamedQuery> out;
  for (const auto& r : records) out.push_back({std::to_string(r.region_id), r.vector});
  return out;
}

void require_profile_kind(const SearchIndex& index, bool have_vectors) {
  const bool builtin = index.profile().kind == ExtractorKind::kBuiltinBaseline;
  if (!builtin && !have_vectors) {
    fail(ErrorKind::kProfileMismatch, "index profile '" + index.profile().name +
                                          "' needs query vectors (--query-features)");
  }
}

std::vector<QueryResult> run_query(const SearchIndex& index, const FeatureVector& v,
                                   DistanceMode mode, std::size_t n, bool pp,
                                   const PostProcessParams& post, int workers) {
  if (!pp) return query(index, v, mode, n, workers);
  auto pool = query(index, v, mode, std::max(n, post.pool_size), workers);
  auto kept = postprocess_union(pool, post);
  if (kept.size() > n) kept.resize(n);
  return kept;
}

json result_json(const std::string& query_id, const QueryResult& r, DistanceMode mode) {
  json j{{"query_id", query_id}, {"rank", r.rank}, {"page_id", r.page_id},
         {"x", r.bbox.x},        {"y", r.bbox.y},   {"w", r.bbox.w},
         {"h", r.bbox.h}};
  if (mode == DistanceMode::kHamming) j["distance"] = static_cast<std::int64_t>(r.distance);
  else j["distance"] = r.distance;
  j["mode"] = to_string(mode);
  return j;
}

void draw_box(Image& img, const BoundingBox& b, int thickness) {
  const float color[3] = {0.9f, 0.05f, 0.05f};
  for (int y = b.y; y < b.bottom(); ++y) {
    for (int x = b.x; x < b.right(); ++x) {
      const bool border = x < b.x + thickness || x >= b.right() - thickness ||
                          y < b.y + thickness || y >= b.bottom() - thickness;
      if (!border || x >= img.width() || y >= img.height()) continue;
      for (int c = 0; c < img.channels(); ++c) img.at(x, y, c) = color[c];
    }
  }
}

void write_overlays(const SearchIndex& index, const std::string& query_id,
                    const std::vector<QueryResult>& results, int top, const fs::path& dir) {
  fs::create_directories(dir);
  std::map<std::string, std::vector<BoundingBox>> by_page;
  std::vector<std::string> order;
  for (int i = 0; i < std::min<int>(top, static_cast<int>(results.size())); ++i) {
    if (!by_page.count(results[i].page_id)) order.push_back(results[i].page_id);
    by_page[results[i].page_id].push_back(results[i].bbox);
  }
  for (const auto& page_id : order) {
    const auto it = std::find_if(index.pages().begin(), index.pages().end(),
                                 [&](const PageInfo& p) { return p.id == page_id; });
    if (it == index.pages().end() || it->path.empty()) {
      fail(ErrorKind::kDataError, "index does not record a path for page '" + page_id + "'");
    }
    Image page = gray_to_rgb(load_image(it->path));
    for (const auto& b : by_page[page_id]) draw_box(page, b, 2);
    save_png(page, dir / (query_id + "__" + page_id + ".png"));
  }
}

int cmd_query(const QueryOptions& opt, std::ostream& out) {
  if (opt.query_images.empty() && opt.query_features.empty()) {
    usage_error("give query images or --query-features");
  }
  const DistanceMode mode = parse_mode(opt.mode);
  const SearchIndex index = SearchIndex::load(opt.index_dir);
  if (index.empty()) fail(ErrorKind::kEmptyIndex, "index has no entries");
  require_profile_kind(index, !opt.query_features.empty());

  std::vector<NamedQuery> queries;
  if (!opt.query_features.empty()) queries = vectors_from_file(opt.query_features, index);
  for (const auto& path : opt.query_images) {
    if (index.profile().kind != ExtractorKind::kBuiltinBaseline) {
      fail(ErrorKind::kProfileMismatch, "query images need the baseline profile; index uses '" +
                                            index.profile().name + "'");
    }
    queries.push_back({fs::path(path).stem().string(), extract_baseline(load_image(path))});
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.out_file.empty()) {
    file.open(opt.out_file, std::ios::trunc);
    if (!file) fail(ErrorKind::kIoError, "cannot write " + opt.out_file);
    sink = &file;
  }
  for (const auto& q : queries) {
    const auto results = run_query(index, q.vector, mode, static_cast<std::size_t>(opt.n), opt.pp,
                                   opt.post, opt.workers);
    for (const auto& r : results) *sink << result_json(q.id, r, mode).dump() << "\n";
    if (!opt.overlay_dir.empty()) write_overlays(index, q.id, results, opt.overlay_top, opt.overlay_dir);
  }
  return kExitOk;
}

fs::path find_page_file(const fs::path& dir, const std::string& id) {
  for (const char* ext : {".png", ".jpg", ".jpeg", ".PNG", ".JPG", ".JPEG"}) {
    const fs::path p = dir / (id + ext);
    if (fs::exists(p)) return p;
  }
  fail(ErrorKind::kIoError, "page '" + id + "' not found in " + dir.string());
}

// Query vectors for every GT query: cut from the source page for the
// baseline profile, or taken from a feature file (record id = GT position).
std::vector<NamedQuery> gt_queries(const SearchIndex& index, const GroundTruth& gt,
                                   const std::string& pages_dir, const std::string& features,
                                   std::vector<double>* extract_ms = nullptr) {
  require_profile_kind(index, !features.empty());
  std::vector<NamedQuery> out;
  if (!features.empty()) {
    const auto records = load_external_features(features, index.profile());
    std::map<std::uint64_t, const FeatureRecord*> by_id;
    for (const auto& r : records) by_id[r.region_id] = &r;
    for (std::size_t i = 0; i < gt.queries.size(); ++i) {
      const auto it = by_id.find(i);
      if (it == by_id.end()) {
        fail(ErrorKind::kDataError, "query feature file has no record " + std::to_string(i) +
                                        " for query '" + gt.queries[i].id + "'");
      }
      out.push_back({gt.queries[i].id, it->second->vector});
    }
    return out;
  }
  std::map<std::string, Image> cache;
  for (const auto& q : gt.queries) {
    auto it = cache.find(q.page);
    if (it == cache.end()) {
      fs::path path;
      if (!pages_dir.empty()) {
        path = find_page_file(pages_dir, q.page);
      } else {
        const auto p = std::find_if(index.pages().begin(), index.pages().end(),
                                    [&](const PageInfo& info) { return info.id == q.page; });
        if (p == index.pages().end()) {
          fail(ErrorKind::kDataError, "query '" + q.id + "' refers to page '" + q.page +
                                          "' which is not in the index; pass --pages");
        }
        path = p->path;
      }
      it = cache.emplace(q.page, load_image(path)).first;
    }
    const Image& page = it->second;
    if (!q.bbox.within(page.width(), page.height())) {
      fail(ErrorKind::kDataError, "query '" + q.id + "' bbox lies outside its page");
    }
    const auto t0 = std::chrono::steady_clock::now();
    FeatureVector v = extract_baseline(page.crop(q.bbox.x, q.bbox.y, q.bbox.w, q.bbox.h));
    const auto t1 = std::chrono::steady_clock::now();
    if (extract_ms) extract_ms->push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    out.push_back({q.id, std::move(v)});
  }
  return out;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
  const Task task = parse_task(opt.task);
  const DistanceMode mode = parse_mode(opt.mode);
  std::vector<std::size_t> cutoffs = opt.cutoffs;
  const GroundTruth gt = load_ground_truth(opt.gt_file);
  if (gt.queries.empty()) fail(ErrorKind::kDataError, "ground truth has no queries");
  const SearchIndex index = SearchIndex::load(opt.index_dir);

  const auto queries = gt_queries(index, gt, opt.pages_dir, opt.query_features);
  const std::size_t depth = *std::max_element(cutoffs.begin(), cutoffs.end());
  std::vector<QueryRun> runs;
  for (const auto& q : queries) {
    // IR needs every page reachable; pages are cut after de-duplication.
    const std::size_t n = task == Task::kImageRetrieval ? index.size() : depth;
    runs.push_back({q.id, run_query(index, q.vector, mode, n, opt.pp, opt.post, opt.workers)});
  }
  EvalReport report = task == Task::kImageRetrieval ? eval_ir(runs, gt, cutoffs)
                                                    : eval_ps(runs, gt, cutoffs, opt.iou_thresh);
  report.mode = to_string(mode);
  report.postprocessed = opt.pp;
  for (const auto& id : report.excluded) {
    out << "warning: query '" << id << "' has no relevant items and is left out of the mean\n";
  }
  const std::string doc = report_to_json(report);
  if (!opt.out_file.empty()) {
    std::ofstream f(opt.out_file, std::ios::trunc);
    if (!f) fail(ErrorKind::kIoError, "cannot write " + opt.out_file);
    f << doc;
  }
  out << doc << report_table(report);
  return kExitOk;
}

std::string fmt_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

int cmd_bench(const BenchOptions& opt, std::ostream& out) {
  if (opt.modes.empty()) usage_error("--modes needs at least one mode");
  std::vector<DistanceMode> modes;
  for (const auto& m : opt.modes) modes.push_back(parse_mode(m));
  const SearchIndex index = SearchIndex::load(opt.index_dir);
  if (index.empty()) fail(ErrorKind::kEmptyIndex, "index has no entries");

  std::vector<FeatureVector> vectors;
  std::vector<double> extract_ms;
  if (!opt.query_features.empty()) {
    for (auto& q : vectors_from_file(opt.query_features, index)) vectors.push_back(std::move(q.vector));
  } else if (!opt.queries_dir.empty()) {
    require_profile_kind(index, false);
    for (const auto& path : list_images(opt.queries_dir)) {
      const Image img = load_image(path);
      const auto t0 = std::chrono::steady_clock::now();
      vectors.push_back(extract_baseline(img));
      const auto t1 = std::chrono::steady_clock::now();
      extract_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  } else if (!opt.gt_file.empty()) {
    const GroundTruth gt = load_ground_truth(opt.gt_file);
    for (auto& q : gt_queries(index, gt, opt.pages_dir, "", &extract_ms)) vectors.push_back(std::move(q.vector));
  } else {
    usage_error("give --queries, --gt or --query-features");
  }
  if (vectors.empty()) fail(ErrorKind::kDataError, "no queries to benchmark");

  const auto extract = mean_stddev(extract_ms);
  out << "queries: " << vectors.size() << ", candidates: " << index.size() << ", dims: "
      << index.dims() << "\n";
  out << "mode        scan_mean_ms  scan_std_ms  extract_mean_ms\n";
  for (const auto mode : modes) {
    const auto t = benchmark(index, vectors, mode, static_cast<std::size_t>(opt.n), opt.workers);
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s  %12.3f  %11.3f  %15.3f\n", to_string(mode),
                  t.scan_mean_ms, t.scan_stddev_ms, extract.mean);
    out << line;
  }
  const auto s = storage_report(index);
  out << "storage     float_bytes  binary_bytes  ratio\n";
  out << "payload     " << s.float_bytes << "  " << s.binary_bytes << "  "
      << fmt_double("%.1f", s.ratio) << "\n";
  return kExitOk;
}

int cmd_synth(const SynthOptions& opt, std::ostream& out) {
  const SynthCorpus corpus = generate(opt.spec);
  write_corpus(corpus, opt.out_dir);
  std::size_t occurrences = 0;
  for (const auto& q : corpus.ground_truth.queries) occurrences += q.occurrences.size();
  out << "pages: " << corpus.pages.size() << ", queries: " << corpus.queries.size()
      << ", ground-truth occurrences: " << occurrences << "\n"
      << "written to " << opt.out_dir << "\n";
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return kExitUsage;
    case ErrorKind::kInternal: return kExitInternal;
    default: return kExitData;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pattern spotting and image retrieval over scanned document pages", "docspot"};
  app.require_subcommand(1);

  IndexOptions index_opt;
  index_opt.build.workers = default_workers();
  auto* index_cmd = app.add_subcommand("index", "Offline phase: propose regions and build an index");
  add_config(index_cmd);
  index_cmd->add_option("--pages", index_opt.pages_dir, "Directory of PNG/JPEG page images")->required();
  index_cmd->add_option("--out", index_opt.out_dir, "Index output directory");
  index_cmd->add_option("--profile", index_opt.profile, "Feature profile")->capture_default_str();
  index_cmd->add_option("--features", index_opt.features_file, "External PSFEAT feature file");
  index_cmd->add_option("--alpha", index_opt.build.filter.alpha, "Edge-density threshold")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  index_cmd->add_option("--k", index_opt.build.segmentation.k, "Segmentation scale")
      ->check(CLI::PositiveNumber)->capture_default_str();
  index_cmd->add_option("--min-size", index_opt.build.segmentation.min_size, "Minimum segment size")
      ->check(CLI::Range(1, 1 << 30))->capture_default_str();
  index_cmd->add_option("--seg-sigma", index_opt.build.segmentation.sigma, "Segmentation pre-smoothing")
      ->check(CLI::Range(0.0, 10.0))->capture_default_str();
  index_cmd->add_option("--min-side", index_opt.build.filter.min_side, "Smallest box side in pixels")
      ->check(CLI::Range(1, 1 << 30))->capture_default_str();
  index_cmd->add_option("--max-side-frac", index_opt.build.filter.max_side_frac,
                        "Largest box side as a fraction of the page side")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  index_cmd->add_option("--canny-low", index_opt.build.filter.edges.low, "Low hysteresis threshold")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  index_cmd->add_option("--canny-high", index_opt.build.filter.edges.high, "High hysteresis threshold")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  index_cmd->add_flag("--no-normalize", index_opt.no_normalize, "Skip L2 normalization");
  index_cmd->add_option("--proposals-report", index_opt.proposals_report, "Per-page counts as JSON lines");
  index_cmd->add_option("--manifest-out", index_opt.manifest_out,
                        "Crops manifest CSV for an external feature exporter");
  index_cmd->add_flag("--propose-only", index_opt.propose_only, "Stop after proposals");
  index_cmd->add_option("--workers", index_opt.build.workers, "Worker threads")
      ->check(CLI::Range(1, 1024));

  QueryOptions query_opt;
  auto* query_cmd = app.add_subcommand("query", "Online phase: rank candidates for query images");
  add_config(query_cmd);
  query_cmd->add_option("--index", query_opt.index_dir, "Index directory")->required();
  query_cmd->add_option("queries", query_opt.query_images, "Query images");
  query_cmd->add_option("--query-features", query_opt.query_features, "PSFEAT file of query vectors");
  query_cmd->add_option("--mode", query_opt.mode, "euclidean or hamming")
      ->check(CLI::IsMember({"euclidean", "hamming"}))->capture_default_str();
  query_cmd->add_option("-n", query_opt.n, "Results per query")
      ->check(CLI::Range(1, 1 << 30))->capture_default_str();
  query_cmd->add_flag("--pp", query_opt.pp, "Union post-processing");
  query_cmd->add_option("--pool-size", query_opt.post.pool_size, "Post-processing pool")
      ->check(CLI::Range(1, 1 << 30))->capture_default_str();
  query_cmd->add_option("--union-iou", query_opt.post.union_iou, "Post-processing IoU")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  query_cmd->add_option("--out", query_opt.out_file, "JSON lines output file (default stdout)");
  query_cmd->add_option("--overlay-dir", query_opt.overlay_dir, "Write pages with top boxes drawn");
  query_cmd->add_option("--overlay-top", query_opt.overlay_top, "Boxes per overlay")
      ->check(CLI::Range(1, 1000));
  query_cmd->add_option("--workers", query_opt.workers, "Scan shards")->check(CLI::Range(1, 1024));

  EvalOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate IR or PS mAP against ground truth");
  add_config(eval_cmd);
  eval_cmd->add_option("--index", eval_opt.index_dir, "Index directory")->required();
  eval_cmd->add_option("--gt", eval_opt.gt_file, "Ground-truth JSON")->required();
  eval_cmd->add_option("--task", eval_opt.task, "ir or ps")
      ->check(CLI::IsMember({"ir", "ps"}))->capture_default_str();
  eval_cmd->add_option("--mode", eval_opt.mode, "euclidean or hamming")
      ->check(CLI::IsMember({"euclidean", "hamming"}))->capture_default_str();
  eval_cmd->add_option("--n", eval_opt.cutoffs, "Cutoffs, comma separated")
      ->delimiter(',')->check(CLI::Range(1, 1 << 30))->capture_default_str();
  eval_cmd->add_flag("--pp", eval_opt.pp, "Union post-processing");
  eval_cmd->add_option("--pool-size", eval_opt.post.pool_size, "Post-processing pool")
      ->check(CLI::Range(1, 1 << 30));
  eval_cmd->add_option("--union-iou", eval_opt.post.union_iou, "Post-processing IoU")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--iou-thresh", eval_opt.iou_thresh, "PS relevance IoU")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  eval_cmd->add_option("--pages", eval_opt.pages_dir, "Page directory (default: paths in the index)");
  eval_cmd->add_option("--query-features", eval_opt.query_features, "PSFEAT query vectors");
  eval_cmd->add_option("--out", eval_opt.out_file, "Write the JSON report here too");
  eval_cmd->add_option("--workers", eval_opt.workers, "Scan shards")->check(CLI::Range(1, 1024));

  BenchOptions bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "Time scans and report storage");
  add_config(bench_cmd);
  bench_cmd->add_option("--index", bench_opt.index_dir, "Index directory")->required();
  bench_cmd->add_option("--queries", bench_opt.queries_dir, "Directory of query images");
  bench_cmd->add_option("--gt", bench_opt.gt_file, "Ground truth whose queries are timed");
  bench_cmd->add_option("--pages", bench_opt.pages_dir, "Page directory for --gt");
  bench_cmd->add_option("--query-features", bench_opt.query_features, "PSFEAT query vectors");
  bench_cmd->add_option("--modes", bench_opt.modes, "Modes, comma separated")
      ->delimiter(',')->check(CLI::IsMember({"euclidean", "hamming"}))->capture_default_str();
  bench_cmd->add_option("-n", bench_opt.n, "Results per query")->check(CLI::Range(1, 1 << 30));
  bench_cmd->add_option("--workers", bench_opt.workers, "Scan shards")->check(CLI::Range(1, 1024));

  SynthOptions synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  add_config(synth_cmd);
  synth_cmd->add_option("--out", synth_opt.out_dir, "Output directory")->required();
  synth_cmd->add_option("--pages", synth_opt.spec.page_count, "Page count")
      ->check(CLI::Range(1, 100000))->capture_default_str();
  synth_cmd->add_option("--width", synth_opt.spec.page_width, "Page width")
      ->check(CLI::Range(16, 1 << 15))->capture_default_str();
  synth_cmd->add_option("--height", synth_opt.spec.page_height, "Page height")
      ->check(CLI::Range(16, 1 << 15))->capture_default_str();
  synth_cmd->add_option("--classes", synth_opt.spec.glyph_classes, "Glyph classes")
      ->check(CLI::Range(1, kGlyphShapeCount))->capture_default_str();
  synth_cmd->add_option("--plants", synth_opt.spec.plants_per_page, "Plants per page")
      ->check(CLI::Range(0, 1000))->capture_default_str();
  synth_cmd->add_option("--glyph-size", synth_opt.spec.glyph_size, "Glyph size in pixels")
      ->check(CLI::Range(8, 4096))->capture_default_str();
  synth_cmd->add_option("--queries-per-class", synth_opt.spec.queries_per_class, "Queries per class")
      ->check(CLI::Range(0, 1000))->capture_default_str();
  synth_cmd->add_option("--noise", synth_opt.spec.noise, "Background noise amplitude")
      ->check(CLI::Range(0.0, 0.5))->capture_default_str();
  bool no_rules = false;
  synth_cmd->add_flag("--no-rules", no_rules, "Disable faint ruled lines");
  synth_cmd->add_option("--seed", synth_opt.spec.seed, "RNG seed")->capture_default_str();

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "docspot: " << e.what() << "\n";
    return kExitUsage;
  }
  synth_opt.spec.ruled_lines = !no_rules;

  try {
    if (*index_cmd) return cmd_index(index_opt, out);
    if (*query_cmd) return cmd_query(query_opt, out);
    if (*eval_cmd) return cmd_eval(eval_opt, out);
    if (*bench_cmd) return cmd_bench(bench_opt, out);
    if (*synth_cmd) return cmd_synth(synth_opt, out);
  } catch (const CLI::ValidationError& e) {
    err << "docspot: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "docspot: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "docspot: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace docspot::cli
