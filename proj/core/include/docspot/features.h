#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docspot/image.h"

namespace docspot {

struct FeatureVector {
  std::vector<float> values;

  std::size_t dims() const { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class ExtractorKind { kBuiltinBaseline, kExternal };

struct ExtractorProfile {
  std::string name;
  std::size_t dims = 0;
  ExtractorKind kind = ExtractorKind::kExternal;

  friend bool operator==(const ExtractorProfile&, const ExtractorProfile&) = default;
};

inline constexpr std::size_t kBaselineDims = 640;
inline constexpr int kBaselineInputSize = 224;

ExtractorProfile baseline_profile();

// Built-in baseline plus the CNN feature layouts an external exporter may
// produce (resnet-conv, resnet-gapool, vgg19-blocks, vgg19-block4-5,
// vgg19-block2-3, vgg19-block2-5, alexnet).
std::span<const ExtractorProfile> known_profiles();
std::optional<ExtractorProfile> find_profile(std::string_view name);

// Deterministic 640-dim descriptor. The crop is resized to 224x224 and
// split into a 4x4 grid of 56x56 cells; each cell contributes 40 values:
//   [0, 3)   mean R, G, B
//   [3, 35)  8-bin signed gradient-orientation histograms of its 2x2
//            sub-cells, magnitude weighted, L2-normalized as one block
//   [35, 40) 5-bin luminance histogram (fractions)
FeatureVector extract_baseline(const Image& crop);

// Offsets of the gradient block inside cell `cell` of a baseline vector.
inline constexpr std::size_t kBaselineCellDims = 40;
inline constexpr std::size_t kBaselineGradientOffset = 3;
inline constexpr std::size_t kBaselineGradientDims = 32;

struct NormalizeResult {
  FeatureVector vector;
  bool degenerate = false;  // Input had zero norm and was returned as is.
};

NormalizeResult l2_normalize(const FeatureVector& v);
// In-place variant; returns false for a zero vector (left unchanged).
bool l2_normalize_inplace(std::span<float> v);

// On-disk feature file: "PSFEAT01", u32 count, u32 dims, then per record a
// u64 region id and dims float32 values, all little-endian, no padding.
struct FeatureFile {
  std::size_t dims = 0;
  std::vector<std::uint64_t> ids;
  std::vector<float> values;  // ids.size() * dims, row-major.

  std::size_t count() const { return ids.size(); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dims, dims);
  }
};

void write_feature_file(const std::filesystem::path& path,
                        std::span<const std::uint64_t> ids,
                        std::span<const float> values, std::size_t dims);
FeatureFile read_feature_file(const std::filesystem::path& path);

struct FeatureRecord {
  std::uint64_t region_id = 0;
  FeatureVector vector;
};

// Reads a feature file and checks its dims against the profile. Bad magic,
// truncation and dims mismatch raise distinct error kinds.
std::vector<FeatureRecord> load_external_features(
    const std::filesystem::path& path, const ExtractorProfile& expected);

}  // namespace docspot
