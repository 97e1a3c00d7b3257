#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "docspot/box.h"
#include "docspot/eval.h"
#include "docspot/image.h"
#include "docspot/index.h"

namespace docspot {

// Procedural ink shapes, all single connected strokes that fill their
// bounding square.
enum class GlyphShape {
  kRing,
  kCappedCross,
  kLetterE,
  kFramedDiamond,
  kLetterS,
  kLattice,
};

inline constexpr int kGlyphShapeCount = 6;

struct SynthSpec {
  int page_count = 20;
  int page_width = 400;
  int page_height = 300;
  int glyph_classes = 5;
  int plants_per_page = 3;
  int glyph_size = 48;
  int queries_per_class = 1;
  double noise = 0.02;
  bool ruled_lines = true;
  std::uint64_t seed = 1;
};

struct SynthQuery {
  std::string id;
  int glyph_class = 0;
  std::string page;
  BoundingBox bbox;
  Image crop;
};

struct SynthCorpus {
  std::vector<PageInput> pages;
  GroundTruth ground_truth;
  std::vector<SynthQuery> queries;
};

// Renders glyph class c (0-based) as a gray ink mask of size x size, values
// in [0, 1] where 1 is full ink.
Image render_glyph(int glyph_class, int size);

// Planted glyph pages. Plants are spread round-robin over the classes, so
// page_count * plants_per_page plants give each class an equal share when
// divisible. All pixel values are quantized to 8-bit levels, so writing the
// pages as PNG and reading them back is lossless.
SynthCorpus generate(const SynthSpec& spec);

// Writes pages/<id>.png, queries/<id>.png and gt.json under dir.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace docspot
