#include "docspot/features.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "docspot/error.h"
#include "docspot/imgproc.h"

namespace docspot {

namespace {

constexpr char kFeatureMagic[8] = {'P', 'S', 'F', 'E', 'A', 'T', '0', '1'};
constexpr int kGrid = 4;
constexpr int kCell = kBaselineInputSize / kGrid;  // 56
constexpr int kSubCell = kCell / 2;                 // 28
constexpr int kOrientationBins = 8;
constexpr int kLumaBins = 5;
// Keeps near-flat cells from being blown up to unit length.
constexpr double kBlockEpsilon = 1e-3;

static_assert(kGrid * kGrid * kBaselineCellDims == kBaselineDims);
static_assert(kBaselineGradientOffset + kBaselineGradientDims + kLumaBins ==
              kBaselineCellDims);

const std::array<ExtractorProfile, 8> kProfiles = {{
    {"baseline", kBaselineDims, ExtractorKind::kBuiltinBaseline},
    {"resnet-conv", 100352, ExtractorKind::kExternal},
    {"resnet-gapool", 2048, ExtractorKind::kExternal},
    {"vgg19-blocks", 1472, ExtractorKind::kExternal},
    {"vgg19-block4-5", 1024, ExtractorKind::kExternal},
    {"vgg19-block2-3", 384, ExtractorKind::kExternal},
    {"vgg19-block2-5", 640, ExtractorKind::kExternal},
    {"alexnet", 4096, ExtractorKind::kExternal},
}};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

ExtractorProfile baseline_profile() { return kProfiles[0]; }

std::span<const ExtractorProfile> known_profiles() { return kProfiles; }

std::optional<ExtractorProfile> find_profile(std::string_view name) {
  for (const auto& p : kProfiles)
    if (p.name == name) return p;
  return std::nullopt;
}

FeatureVector extract_baseline(const Image& crop) {
  if (crop.empty()) fail(ErrorKind::kInvalidArgument, "cannot extract features of an empty crop");
  const Image img = resize_bilinear(gray_to_rgb(crop), kBaselineInputSize, kBaselineInputSize);
  constexpr int n = kBaselineInputSize;

  std::vector<double> luma(static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      luma[static_cast<std::size_t>(y) * n + x] =
          0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
  auto L = [&](int x, int y) {
    x = std::clamp(x, 0, n - 1);
    y = std::clamp(y, 0, n - 1);
    return luma[static_cast<std::size_t>(y) * n + x];
  };

  FeatureVector out;
  out.values.assign(kBaselineDims, 0.0f);
  const double bin_width = 2.0 * std::numbers::pi / kOrientationBins;

  for (int cy = 0; cy < kGrid; ++cy) {
    for (int cx = 0; cx < kGrid; ++cx) {
      float* cell = &out.values[(static_cast<std::size_t>(cy) * kGrid + cx) * kBaselineCellDims];
      double color[3] = {0, 0, 0};
      double grad[kBaselineGradientDims] = {};
      double lumahist[kLumaBins] = {};
      for (int y = cy * kCell; y < (cy + 1) * kCell; ++y) {
        for (int x = cx * kCell; x < (cx + 1) * kCell; ++x) {
          for (int c = 0; c < 3; ++c) color[c] += img.at(x, y, c);
          const double l = L(x, y);
          lumahist[std::clamp(static_cast<int>(l * kLumaBins), 0, kLumaBins - 1)] += 1.0;

          const double gx = L(x + 1, y) - L(x - 1, y);
          const double gy = L(x, y + 1) - L(x, y - 1);
          const double mag = std::hypot(gx, gy);
          if (mag <= 0.0) continue;
          double angle = std::atan2(gy, gx);
          if (angle < 0) angle += 2.0 * std::numbers::pi;
          // Bins are centered on multiples of 45 degrees.
          const int bin = static_cast<int>(std::floor(angle / bin_width + 0.5)) % kOrientationBins;
          const int sub = ((y - cy * kCell) / kSubCell) * 2 + (x - cx * kCell) / kSubCell;
          grad[sub * kOrientationBins + bin] += mag;
        }
      }
      const double area = static_cast<double>(kCell) * kCell;
      for (int c = 0; c < 3; ++c) cell[c] = static_cast<float>(color[c] / area);
      double sq = 0.0;
      for (double g : grad) sq += g * g;
      const double norm = std::sqrt(sq + kBlockEpsilon * kBlockEpsilon);
      for (std::size_t i = 0; i < kBaselineGradientDims; ++i)
        cell[kBaselineGradientOffset + i] = static_cast<float>(grad[i] / norm);
      for (int b = 0; b < kLumaBins; ++b)
        cell[kBaselineGradientOffset + kBaselineGradientDims + b] =
            static_cast<float>(lumahist[b] / area);
    }
  }
  return out;
}

NormalizeResult l2_normalize(const FeatureVector& v) {
  NormalizeResult r{v, false};
  r.degenerate = !l2_normalize_inplace(r.vector.values);
  return r;
}

bool l2_normalize_inplace(std::span<float> v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  if (sq <= 0.0) return false;
  const double inv = 1.0 / std::sqrt(sq);
  for (float& x : v) x = static_cast<float>(x * inv);
  return true;
}

void write_feature_file(const std::filesystem::path& path,
                        std::span<const std::uint64_t> ids,
                        std::span<const float> values, std::size_t dims) {
  if (dims == 0) fail(ErrorKind::kInvalidArgument, "feature dims must be > 0");
  if (values.size() != ids.size() * dims) {
    fail(ErrorKind::kInvalidArgument, "feature payload does not match count x dims");
  }
  std::string buf(kFeatureMagic, sizeof(kFeatureMagic));
  buf.reserve(16 + ids.size() * (8 + dims * 4));
  put_u32(buf, static_cast<std::uint32_t>(ids.size()));
  put_u32(buf, static_cast<std::uint32_t>(dims));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    put_u64(buf, ids[i]);
    for (std::size_t d = 0; d < dims; ++d) put_u32(buf, std::bit_cast<std::uint32_t>(values[i * dims + d]));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIoError, "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorKind::kIoError, "short write to " + path.string());
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < sizeof(kFeatureMagic)) {
    fail(ErrorKind::kTruncatedFile, path.string() + ": file shorter than the feature header");
  }
  if (std::memcmp(bytes.data(), kFeatureMagic, sizeof(kFeatureMagic)) != 0) {
    fail(ErrorKind::kBadMagic, path.string() + ": not a PSFEAT01 feature file");
  }
  if (bytes.size() < 16) {
    fail(ErrorKind::kTruncatedFile, path.string() + ": file shorter than the feature header");
  }
  FeatureFile f;
  const std::uint32_t count = get_u32(p + 8);
  f.dims = get_u32(p + 12);
  if (f.dims == 0) fail(ErrorKind::kDataError, path.string() + ": feature dims is 0");
  const std::uint64_t record = 8 + static_cast<std::uint64_t>(f.dims) * 4;
  const std::uint64_t expected = 16 + record * count;
  if (bytes.size() < expected) {
    fail(ErrorKind::kTruncatedFile,
         path.string() + ": payload holds " + std::to_string(bytes.size() - 16) +
             " bytes, header declares " + std::to_string(expected - 16));
  }
  if (bytes.size() > expected) {
    fail(ErrorKind::kDataError, path.string() + ": trailing bytes after the last record");
  }
  f.ids.resize(count);
  f.values.resize(static_cast<std::size_t>(count) * f.dims);
  const unsigned char* q = p + 16;
  for (std::uint32_t i = 0; i < count; ++i) {
    f.ids[i] = get_u64(q);
    q += 8;
    for (std::size_t d = 0; d < f.dims; ++d, q += 4) {
      const float v = std::bit_cast<float>(get_u32(q));
      if (!std::isfinite(v)) {
        fail(ErrorKind::kDataError, path.string() + ": non-finite value in record " +
                                        std::to_string(i));
      }
      f.values[static_cast<std::size_t>(i) * f.dims + d] = v;
    }
  }
  return f;
}

std::vector<FeatureRecord> load_external_features(const std::filesystem::path& path,
                                                  const ExtractorProfile& expected) {
  FeatureFile f = read_feature_file(path);
  if (f.dims != expected.dims) {
    fail(ErrorKind::kDimensionMismatch,
         path.string() + ": file has " + std::to_string(f.dims) + "-dim features, profile '" +
             expected.name + "' expects " + std::to_string(expected.dims));
  }
  std::vector<FeatureRecord> out(f.count());
  for (std::size_t i = 0; i < f.count(); ++i) {
    out[i].region_id = f.ids[i];
    const auto row = f.row(i);
    out[i].vector.values.assign(row.begin(), row.end());
  }
  return out;
}

}  // namespace docspot
