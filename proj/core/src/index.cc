#include "docspot/index.h"

#include <fstream>
#include <map>
#include <string>

#include "docspot/error.h"
#include "json.hpp"
#include "parallel.h"

namespace docspot {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kIndexFormat = "docspot-index-1";

const char* kind_name(ExtractorKind k) {
  return k == ExtractorKind::kBuiltinBaseline ? "builtin-baseline" : "external";
}

ExtractorKind parse_kind(const std::string& s) {
  if (s == "builtin-baseline") return ExtractorKind::kBuiltinBaseline;
  if (s == "external") return ExtractorKind::kExternal;
  fail(ErrorKind::kDataError, "unknown extractor kind '" + s + "' in index metadata");
}

json bbox_json(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

BoundingBox bbox_from(const json& j) {
  if (!j.is_array() || j.size() != 4) fail(ErrorKind::kDataError, "bbox must be [x, y, w, h]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

void assign_offsets(std::vector<IndexEntry>& entries, std::size_t dims) {
  const std::uint64_t feature_record = 8 + dims * 4;
  const std::uint64_t code_record = 8 + words_for_bits(dims) * 8;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].feature_offset = 16 + i * feature_record;
    entries[i].code_offset = 16 + i * code_record;
  }
}

}  // namespace

StorageReport storage_for(std::uint64_t count, std::uint64_t dims) {
  StorageReport r;
  r.float_bytes = count * dims * 4;
  r.binary_bytes = count * words_for_bits(dims) * 8;
  r.ratio = r.binary_bytes == 0 ? 0.0
                                : static_cast<double>(r.float_bytes) / static_cast<double>(r.binary_bytes);
  return r;
}

StorageReport storage_report(const SearchIndex& index) {
  return storage_for(index.size(), index.dims());
}

SearchIndex SearchIndex::assemble(ExtractorProfile profile, bool normalize,
                                  std::vector<PageInfo> pages,
                                  std::vector<IndexEntry> entries,
                                  std::vector<float> features) {
  if (profile.dims == 0) fail(ErrorKind::kInvalidArgument, "profile dims must be > 0");
  if (entries.empty()) fail(ErrorKind::kEmptyIndex, "cannot assemble an index without entries");
  if (features.size() != entries.size() * profile.dims) {
    fail(ErrorKind::kDimensionMismatch, "feature matrix does not match entries x dims");
  }
  SearchIndex index;
  index.profile_ = std::move(profile);
  index.normalized_ = normalize;
  index.pages_ = std::move(pages);
  index.entries_ = std::move(entries);
  index.features_ = std::move(features);
  const std::size_t dims = index.dims();
  if (normalize) {
    for (std::size_t i = 0; i < index.size(); ++i)
      l2_normalize_inplace(std::span<float>(index.features_).subspan(i * dims, dims));
  }
  index.binarizer_ = fit_binarizer(index.features_, dims);
  const std::size_t words = index.code_words();
  index.codes_.assign(index.size() * words, 0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    binarize_into(index.feature(i), index.binarizer_,
                  std::span<std::uint64_t>(index.codes_).subspan(i * words, words));
  }
  assign_offsets(index.entries_, dims);
  return index;
}

void SearchIndex::save(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  json meta;
  meta["format"] = kIndexFormat;
  meta["profile"] = {{"name", profile_.name},
                     {"dims", profile_.dims},
                     {"kind", kind_name(profile_.kind)}};
  meta["normalized"] = normalized_;
  meta["threshold_rule"] = "median";
  meta["binarizer"] = {{"dims", binarizer_.dims}, {"thresholds", binarizer_.thresholds}};
  json pages = json::array();
  for (const auto& p : pages_) {
    pages.push_back({{"id", p.id}, {"path", p.path}, {"width", p.width}, {"height", p.height}});
  }
  meta["pages"] = std::move(pages);
  json entries = json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"id", e.region_id}, {"page", e.page_id}, {"bbox", bbox_json(e.bbox)}});
  }
  meta["entries"] = std::move(entries);

  {
    std::ofstream out(dir / kMetaFile, std::ios::trunc);
    if (!out) fail(ErrorKind::kIoError, "cannot write " + (dir / kMetaFile).string());
    out << meta.dump(1) << '\n';
  }
  std::vector<std::uint64_t> ids(entries_.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = entries_[i].region_id;
  write_feature_file(dir / kFeatureFile, ids, features_, dims());
  write_code_file(dir / kCodeFile, ids, codes_, dims());
}

SearchIndex SearchIndex::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / kMetaFile);
  if (!in) fail(ErrorKind::kIoError, "cannot open " + (dir / kMetaFile).string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kDataError, "malformed index metadata: " + std::string(e.what()));
  }

  SearchIndex index;
  try {
    if (meta.at("format").get<std::string>() != kIndexFormat) {
      fail(ErrorKind::kDataError, "unsupported index format " + meta.at("format").dump());
    }
    const auto& prof = meta.at("profile");
    index.profile_ = {prof.at("name").get<std::string>(), prof.at("dims").get<std::size_t>(),
                      parse_kind(prof.at("kind").get<std::string>())};
    index.normalized_ = meta.at("normalized").get<bool>();
    index.binarizer_.dims = meta.at("binarizer").at("dims").get<std::size_t>();
    index.binarizer_.thresholds = meta.at("binarizer").at("thresholds").get<std::vector<float>>();
    for (const auto& p : meta.at("pages")) {
      index.pages_.push_back({p.at("id").get<std::string>(), p.at("path").get<std::string>(),
                              p.at("width").get<int>(), p.at("height").get<int>()});
    }
    for (const auto& e : meta.at("entries")) {
      IndexEntry entry;
      entry.region_id = e.at("id").get<std::uint64_t>();
      entry.page_id = e.at("page").get<std::string>();
      entry.bbox = bbox_from(e.at("bbox"));
      index.entries_.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kDataError, "malformed index metadata: " + std::string(e.what()));
  }
  if (index.binarizer_.dims != index.profile_.dims ||
      index.binarizer_.thresholds.size() != index.profile_.dims) {
    fail(ErrorKind::kDataError, "binarizer dims do not match the index profile");
  }

  FeatureFile features = read_feature_file(dir / kFeatureFile);
  CodeFile codes = read_code_file(dir / kCodeFile);
  if (features.dims != index.dims() || codes.dims != index.dims()) {
    fail(ErrorKind::kDimensionMismatch, "payload dims do not match the index profile");
  }
  if (features.count() != index.size() || codes.count() != index.size()) {
    fail(ErrorKind::kDataError, "payload record counts do not match the metadata entries");
  }
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (features.ids[i] != index.entries_[i].region_id || codes.ids[i] != index.entries_[i].region_id) {
      fail(ErrorKind::kDataError, "payload region ids are out of order at record " + std::to_string(i));
    }
  }
  index.features_ = std::move(features.values);
  index.codes_ = std::move(codes.words);
  assign_offsets(index.entries_, index.dims());
  return index;
}

ProposalSet propose_pages(std::span<const PageInput> pages, const BuildConfig& config) {
  std::vector<ProposalResult> per_page(pages.size());
  internal::parallel_for(pages.size(), config.workers, [&](std::size_t i) {
    per_page[i] = propose(pages[i].image, config.segmentation, config.filter);
  });

  ProposalSet set;
  std::uint64_t next_id = 0;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    const auto& page = pages[i];
    set.pages.push_back({page.id, page.path, page.image.width(), page.image.height()});
    set.report.pages.push_back({page.id, per_page[i].stats});
    set.report.total.raw += per_page[i].stats.raw;
    set.report.total.after_size += per_page[i].stats.after_size;
    set.report.total.after_edges += per_page[i].stats.after_edges;
    for (const auto& box : per_page[i].boxes) {
      IndexEntry e;
      e.region_id = next_id++;
      e.page_id = page.id;
      e.bbox = box;
      set.entries.push_back(std::move(e));
    }
  }
  return set;
}

SearchIndex build_index(std::span<const PageInput> pages, const BuildConfig& config,
                        const FeatureFile* external, BuildReport* report) {
  if (pages.empty()) fail(ErrorKind::kInvalidArgument, "build_index needs at least one page");
  const bool builtin = config.profile.kind == ExtractorKind::kBuiltinBaseline;
  if (builtin && external != nullptr) {
    fail(ErrorKind::kInvalidArgument, "external features given for the built-in baseline profile");
  }
  if (!builtin && external == nullptr) {
    fail(ErrorKind::kInvalidArgument,
         "profile '" + config.profile.name + "' needs an external feature file");
  }
  if (builtin && config.profile.dims != kBaselineDims) {
    fail(ErrorKind::kInvalidArgument, "baseline profile must have 640 dims");
  }

  ProposalSet set = propose_pages(pages, config);
  if (report) *report = set.report;
  if (set.entries.empty()) {
    fail(ErrorKind::kEmptyIndex,
         "no candidate region survived filtering (raw " + std::to_string(set.report.total.raw) +
             ", after size filter " + std::to_string(set.report.total.after_size) +
             ", after edge filter " + std::to_string(set.report.total.after_edges) + ")");
  }

  const std::size_t dims = config.profile.dims;
  std::vector<float> features(set.entries.size() * dims);
  if (builtin) {
    std::map<std::string, const Image*> by_id;
    for (const auto& p : pages) by_id[p.id] = &p.image;
    internal::parallel_for(set.entries.size(), config.workers, [&](std::size_t i) {
      const auto& e = set.entries[i];
      const Image& page = *by_id.at(e.page_id);
      const FeatureVector v = extract_baseline(page.crop(e.bbox.x, e.bbox.y, e.bbox.w, e.bbox.h));
      std::copy(v.values.begin(), v.values.end(), features.begin() + i * dims);
    });
  } else {
    if (external->dims != dims) {
      fail(ErrorKind::kDimensionMismatch,
           "external features have " + std::to_string(external->dims) + " dims, profile '" +
               config.profile.name + "' expects " + std::to_string(dims));
    }
    if (external->count() != set.entries.size()) {
      fail(ErrorKind::kDataError, "external feature file has " + std::to_string(external->count()) +
                                      " records for " + std::to_string(set.entries.size()) +
                                      " proposals");
    }
    std::map<std::uint64_t, std::size_t> row_of;
    for (std::size_t r = 0; r < external->count(); ++r) {
      if (!row_of.emplace(external->ids[r], r).second) {
        fail(ErrorKind::kDataError, "duplicate region id " + std::to_string(external->ids[r]) +
                                        " in external feature file");
      }
    }
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
      const auto it = row_of.find(set.entries[i].region_id);
      if (it == row_of.end()) {
        fail(ErrorKind::kDataError, "external feature file has no record for region " +
                                        std::to_string(set.entries[i].region_id));
      }
      const auto row = external->row(it->second);
      std::copy(row.begin(), row.end(), features.begin() + i * dims);
    }
  }
  return SearchIndex::assemble(config.profile, config.normalize, std::move(set.pages),
                               std::move(set.entries), std::move(features));
}

}  // namespace docspot
