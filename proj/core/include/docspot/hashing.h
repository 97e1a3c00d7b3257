#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "docspot/features.h"

namespace docspot {

struct BinarizerParams {
  std::size_t dims = 0;
  std::vector<float> thresholds;

  friend bool operator==(const BinarizerParams&, const BinarizerParams&) = default;
};

inline constexpr std::size_t words_for_bits(std::size_t dims) {
  return (dims + 63) / 64;
}

// Bit i lives in word i / 64 at position i % 64. Padding bits are zero.
struct BinaryCode {
  std::size_t dims = 0;
  std::vector<std::uint64_t> words;

  BinaryCode() = default;
  explicit BinaryCode(std::size_t d) : dims(d), words(words_for_bits(d), 0) {}

  bool bit(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }
  void set_bit(std::size_t i, bool v);

  // Clears the padding bits of the last word.
  void canonicalize();

  friend bool operator==(const BinaryCode&, const BinaryCode&) = default;
};

// Per-dimension median over the corpus (midpoint of the two middle values
// for an even count). Each span is one feature vector.
BinarizerParams fit_binarizer(std::span<const FeatureVector> features);
// Same, over a row-major matrix of `count` rows.
BinarizerParams fit_binarizer(std::span<const float> matrix, std::size_t dims);

// bit_i = 1 iff v_i > threshold_i.
BinaryCode binarize(std::span<const float> v, const BinarizerParams& p);
BinaryCode binarize(const FeatureVector& v, const BinarizerParams& p);
void binarize_into(std::span<const float> v, const BinarizerParams& p,
                   std::span<std::uint64_t> out);

inline std::uint32_t hamming_words(const std::uint64_t* a, const std::uint64_t* b,
                                   std::size_t words) {
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < words; ++i) d += std::popcount(a[i] ^ b[i]);
  return d;
}

// Number of differing bits: sum of popcount(q_j XOR p_j) over the words.
std::uint32_t hamming_distance(const BinaryCode& q, const BinaryCode& p);

// Binary code file: "PSHASH01", u32 count, u32 dims, then per record a
// u64 region id and ceil(dims/64) u64 words, all little-endian.
struct CodeFile {
  std::size_t dims = 0;
  std::vector<std::uint64_t> ids;
  std::vector<std::uint64_t> words;  // ids.size() * words_for_bits(dims).

  std::size_t count() const { return ids.size(); }
};

void write_code_file(const std::filesystem::path& path,
                     std::span<const std::uint64_t> ids,
                     std::span<const std::uint64_t> words, std::size_t dims);
CodeFile read_code_file(const std::filesystem::path& path);

}  // namespace docspot
