#include "docspot/hashing.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "docspot/error.h"

namespace docspot {

namespace {

constexpr char kCodeMagic[8] = {'P', 'S', 'H', 'A', 'S', 'H', '0', '1'};

std::uint64_t padding_mask(std::size_t dims) {
  const std::size_t used = dims % 64;
  return used == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << used) - 1;
}

float median_of(std::vector<float>& column) {
  const std::size_t n = column.size();
  const std::size_t mid = n / 2;
  std::nth_element(column.begin(), column.begin() + mid, column.end());
  const float upper = column[mid];
  if (n % 2 == 1) return upper;
  const float lower = *std::max_element(column.begin(), column.begin() + mid);
  return static_cast<float>((static_cast<double>(lower) + upper) / 2.0);
}

}  // namespace

void BinaryCode::set_bit(std::size_t i, bool v) {
  const std::uint64_t m = std::uint64_t{1} << (i % 64);
  if (v) words[i / 64] |= m;
  else words[i / 64] &= ~m;
}

void BinaryCode::canonicalize() {
  if (!words.empty()) words.back() &= padding_mask(dims);
}

BinarizerParams fit_binarizer(std::span<const FeatureVector> features) {
  if (features.empty()) fail(ErrorKind::kInvalidArgument, "cannot fit a binarizer on an empty corpus");
  const std::size_t dims = features.front().dims();
  std::vector<float> matrix;
  matrix.reserve(features.size() * dims);
  for (const auto& f : features) {
    if (f.dims() != dims) {
      fail(ErrorKind::kDimensionMismatch, "corpus mixes feature dims " + std::to_string(dims) +
                                              " and " + std::to_string(f.dims()));
    }
    matrix.insert(matrix.end(), f.values.begin(), f.values.end());
  }
  return fit_binarizer(matrix, dims);
}

BinarizerParams fit_binarizer(std::span<const float> matrix, std::size_t dims) {
  if (dims == 0 || matrix.empty()) {
    fail(ErrorKind::kInvalidArgument, "cannot fit a binarizer on an empty corpus");
  }
  if (matrix.size() % dims != 0) {
    fail(ErrorKind::kDimensionMismatch, "feature matrix is not a whole number of rows");
  }
  const std::size_t rows = matrix.size() / dims;
  BinarizerParams p;
  p.dims = dims;
  p.thresholds.resize(dims);
  std::vector<float> column(rows);
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = matrix[r * dims + d];
    p.thresholds[d] = median_of(column);
  }
  return p;
}

void binarize_into(std::span<const float> v, const BinarizerParams& p,
                   std::span<std::uint64_t> out) {
  if (v.size() != p.dims) {
    fail(ErrorKind::kDimensionMismatch, "vector has " + std::to_string(v.size()) +
                                            " dims, binarizer expects " + std::to_string(p.dims));
  }
  if (out.size() != words_for_bits(p.dims)) {
    fail(ErrorKind::kInvalidArgument, "code buffer has the wrong word count");
  }
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t i = 0; i < p.dims; ++i) {
    if (v[i] > p.thresholds[i]) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

BinaryCode binarize(std::span<const float> v, const BinarizerParams& p) {
  BinaryCode code(p.dims);
  binarize_into(v, p, code.words);
  return code;
}

BinaryCode binarize(const FeatureVector& v, const BinarizerParams& p) {
  return binarize(std::span<const float>(v.values), p);
}

std::uint32_t hamming_distance(const BinaryCode& q, const BinaryCode& p) {
  if (q.dims != p.dims || q.words.size() != p.words.size()) {
    fail(ErrorKind::kDimensionMismatch, "hamming distance between codes of " +
                                            std::to_string(q.dims) + " and " +
                                            std::to_string(p.dims) + " bits");
  }
  if (q.words.empty()) return 0;
  const std::size_t last = q.words.size() - 1;
  std::uint32_t d = hamming_words(q.words.data(), p.words.data(), last);
  d += std::popcount((q.words[last] ^ p.words[last]) & padding_mask(q.dims));
  return d;
}

void write_code_file(const std::filesystem::path& path,
                     std::span<const std::uint64_t> ids,
                     std::span<const std::uint64_t> words, std::size_t dims) {
  const std::size_t per = words_for_bits(dims);
  if (dims == 0) fail(ErrorKind::kInvalidArgument, "code dims must be > 0");
  if (words.size() != ids.size() * per) {
    fail(ErrorKind::kInvalidArgument, "code payload does not match count x words");
  }
  std::string buf(kCodeMagic, sizeof(kCodeMagic));
  buf.reserve(16 + ids.size() * (8 + per * 8));
  auto put = [&buf](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put(ids.size(), 4);
  put(dims, 4);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    put(ids[i], 8);
    for (std::size_t j = 0; j < per; ++j) put(words[i * per + j], 8);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIoError, "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorKind::kIoError, "short write to " + path.string());
}

CodeFile read_code_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open " + path.string());
  const std::string bytes(std::istreambuf_iterator<char>(in), {});
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  auto get = [](const unsigned char* q, int n) {
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | q[i];
    return v;
  };
  if (bytes.size() < sizeof(kCodeMagic)) {
    fail(ErrorKind::kTruncatedFile, path.string() + ": file shorter than the code header");
  }
  if (std::memcmp(bytes.data(), kCodeMagic, sizeof(kCodeMagic)) != 0) {
    fail(ErrorKind::kBadMagic, path.string() + ": not a PSHASH01 code file");
  }
  if (bytes.size() < 16) {
    fail(ErrorKind::kTruncatedFile, path.string() + ": file shorter than the code header");
  }
  CodeFile f;
  const std::uint64_t count = get(p + 8, 4);
  f.dims = get(p + 12, 4);
  if (f.dims == 0) fail(ErrorKind::kDataError, path.string() + ": code dims is 0");
  const std::size_t per = words_for_bits(f.dims);
  const std::uint64_t expected = 16 + count * (8 + per * 8);
  if (bytes.size() < expected) fail(ErrorKind::kTruncatedFile, path.string() + ": truncated code payload");
  if (bytes.size() > expected) {
    fail(ErrorKind::kDataError, path.string() + ": trailing bytes after the last record");
  }
  f.ids.resize(count);
  f.words.resize(count * per);
  const unsigned char* q = p + 16;
  for (std::uint64_t i = 0; i < count; ++i) {
    f.ids[i] = get(q, 8);
    q += 8;
    for (std::size_t j = 0; j < per; ++j, q += 8) f.words[i * per + j] = get(q, 8);
  }
  return f;
}

}  // namespace docspot
