#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "docspot/box.h"
#include "docspot/features.h"
#include "docspot/hashing.h"
#include "docspot/image.h"
#include "docspot/proposals.h"
#include "docspot/segmentation.h"

namespace docspot {

struct IndexEntry {
  std::uint64_t region_id = 0;
  std::string page_id;
  BoundingBox bbox;
  // Byte offsets of the entry's record inside features.psfeat / codes.pshash.
  std::uint64_t feature_offset = 0;
  std::uint64_t code_offset = 0;

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

struct PageInfo {
  std::string id;
  std::string path;
  int width = 0;
  int height = 0;

  friend bool operator==(const PageInfo&, const PageInfo&) = default;
};

struct StorageReport {
  std::uint64_t float_bytes = 0;
  std::uint64_t binary_bytes = 0;
  double ratio = 0.0;
};

// Payload-only storage: count * dims * 4 bytes for float32 features and
// count * ceil(dims / 64) * 8 bytes for packed codes.
StorageReport storage_for(std::uint64_t count, std::uint64_t dims);

// Immutable collection of candidate regions with their (optionally
// L2-normalized) float features, packed binary codes and the binarizer
// used to produce them.
class SearchIndex {
 public:
  SearchIndex() = default;

  // Assembles an index from row-major features (entries.size() x
  // profile.dims). Normalizes rows when `normalize` is set, fits the
  // median binarizer over the corpus and binarizes every row. Entry
  // offsets are recomputed.
  static SearchIndex assemble(ExtractorProfile profile, bool normalize,
                              std::vector<PageInfo> pages,
                              std::vector<IndexEntry> entries,
                              std::vector<float> features);

  const ExtractorProfile& profile() const { return profile_; }
  const BinarizerParams& binarizer() const { return binarizer_; }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  const std::vector<PageInfo>& pages() const { return pages_; }
  bool normalized() const { return normalized_; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t dims() const { return profile_.dims; }
  std::size_t code_words() const { return words_for_bits(profile_.dims); }

  std::span<const float> features() const { return features_; }
  std::span<const std::uint64_t> codes() const { return codes_; }
  std::span<const float> feature(std::size_t i) const {
    return features().subspan(i * dims(), dims());
  }
  std::span<const std::uint64_t> code(std::size_t i) const {
    return codes().subspan(i * code_words(), code_words());
  }

  // Writes meta.json, features.psfeat and codes.pshash into dir.
  void save(const std::filesystem::path& dir) const;
  static SearchIndex load(const std::filesystem::path& dir);

  friend bool operator==(const SearchIndex&, const SearchIndex&) = default;

 private:
  ExtractorProfile profile_;
  BinarizerParams binarizer_;
  bool normalized_ = false;
  std::vector<PageInfo> pages_;
  std::vector<IndexEntry> entries_;
  std::vector<float> features_;
  std::vector<std::uint64_t> codes_;
};

StorageReport storage_report(const SearchIndex& index);

inline constexpr const char* kMetaFile = "meta.json";
inline constexpr const char* kFeatureFile = "features.psfeat";
inline constexpr const char* kCodeFile = "codes.pshash";

struct PageInput {
  std::string id;
  Image image;
  std::string path;
};

struct BuildConfig {
  SegmentParams segmentation;
  FilterParams filter;
  ExtractorProfile profile = baseline_profile();
  bool normalize = true;
  int workers = 1;
};

struct PageProposalStats {
  std::string page_id;
  ProposalStats stats;
};

struct BuildReport {
  std::vector<PageProposalStats> pages;
  ProposalStats total;
};

// Proposals for every page with region ids assigned sequentially in
// (page order, proposal order).
struct ProposalSet {
  std::vector<PageInfo> pages;
  std::vector<IndexEntry> entries;
  BuildReport report;
};

ProposalSet propose_pages(std::span<const PageInput> pages,
                          const BuildConfig& config);

// Offline phase. With `external == nullptr` features come from the
// built-in baseline extractor; otherwise every proposal's region id must
// have exactly one record in the external file, with matching dims.
SearchIndex build_index(std::span<const PageInput> pages,
                        const BuildConfig& config,
                        const FeatureFile* external = nullptr,
                        BuildReport* report = nullptr);

}  // namespace docspot
