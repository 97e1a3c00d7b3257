#include "docspot/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "docspot/error.h"
#include "docspot/image_io.h"

namespace docspot {

namespace {

constexpr double kStroke = 0.2;   // Stroke width in [-1, 1] glyph units.
constexpr int kSupersample = 4;
constexpr int kMargin = 8;        // Minimum gap between plants and to the page border.
constexpr int kRuleSpacing = 24;
constexpr double kRuleDarkening = 0.06;
constexpr double kPaper[3] = {0.93, 0.88, 0.76};
constexpr double kInk[3] = {0.22, 0.16, 0.11};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Library distributions are implementation-defined; these helpers keep the
// corpus identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

bool inked(GlyphShape shape, double u, double v) {
  const double s = kStroke;
  const double au = std::abs(u), av = std::abs(v);
  switch (shape) {
    case GlyphShape::kRing: {
      const double r = std::hypot(u, v);
      return in_band(r, 1.0 - 1.6 * s, 1.0);
    }
    case GlyphShape::kCappedCross:
      return au <= s * 0.8 || av <= s * 0.8 || (au >= 1.0 - s && av <= 0.7) ||
             (av >= 1.0 - s && au <= 0.7);
    case GlyphShape::kLetterE:
      return u <= -1.0 + 1.5 * s || v <= -1.0 + s || v >= 1.0 - s ||
             (av <= s * 0.6 && u <= 0.6);
    case GlyphShape::kFramedDiamond:
      return au >= 1.0 - s || av >= 1.0 - s || in_band(au + av, 1.0 - 0.7 * s, 1.0 + 0.7 * s);
    case GlyphShape::kLetterS:
      return v <= -1.0 + s || v >= 1.0 - s || av <= s * 0.6 ||
             (u <= -1.0 + s && v <= 0.0) || (u >= 1.0 - s && v >= 0.0);
    case GlyphShape::kLattice:
      return au >= 1.0 - s || av >= 1.0 - s || au <= s * 0.6 || av <= s * 0.6;
  }
  return false;
}

struct Plant {
  int glyph_class;
  int x, y;  // Top-left of the glyph square.
  BoundingBox ink_box;  // Tight box of pixels with ink coverage >= 0.5.
};

}  // namespace

Image render_glyph(int glyph_class, int size) {
  if (glyph_class < 0 || glyph_class >= kGlyphShapeCount) {
    fail(ErrorKind::kInvalidArgument, "glyph class out of range: " + std::to_string(glyph_class));
  }
  const auto shape = static_cast<GlyphShape>(glyph_class);
  Image mask(size, size, 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      int hits = 0;
      for (int sy = 0; sy < kSupersample; ++sy) {
        for (int sx = 0; sx < kSupersample; ++sx) {
          const double u = 2.0 * (x + (sx + 0.5) / kSupersample) / size - 1.0;
          const double v = 2.0 * (y + (sy + 0.5) / kSupersample) / size - 1.0;
          hits += inked(shape, u, v) ? 1 : 0;
        }
      }
      mask.at(x, y) = static_cast<float>(hits) / (kSupersample * kSupersample);
    }
  }
  return mask;
}

SynthCorpus generate(const SynthSpec& spec) {
  if (spec.page_count < 1) fail(ErrorKind::kInvalidArgument, "page_count must be >= 1");
  if (spec.glyph_classes < 1 || spec.glyph_classes > kGlyphShapeCount) {
    fail(ErrorKind::kInvalidArgument,
         "glyph_classes must be in [1, " + std::to_string(kGlyphShapeCount) + "]");
  }
  if (spec.plants_per_page < 0) fail(ErrorKind::kInvalidArgument, "plants_per_page must be >= 0");
  if (spec.glyph_size < 8) fail(ErrorKind::kInvalidArgument, "glyph_size must be >= 8");
  if (spec.glyph_size + 2 * kMargin > spec.page_width ||
      spec.glyph_size + 2 * kMargin > spec.page_height) {
    fail(ErrorKind::kInvalidArgument, "glyph larger than page");
  }

  std::vector<Image> masks;
  std::vector<BoundingBox> ink_boxes;
  for (int c = 0; c < spec.glyph_classes; ++c) {
    masks.push_back(render_glyph(c, spec.glyph_size));
    int x0 = spec.glyph_size, y0 = spec.glyph_size, x1 = -1, y1 = -1;
    for (int y = 0; y < spec.glyph_size; ++y)
      for (int x = 0; x < spec.glyph_size; ++x)
        if (masks.back().at(x, y) >= 0.5f) {
          x0 = std::min(x0, x);
          y0 = std::min(y0, y);
          x1 = std::max(x1, x);
          y1 = std::max(y1, y);
        }
    ink_boxes.push_back({x0, y0, x1 - x0 + 1, y1 - y0 + 1});
  }

  SynthCorpus corpus;
  std::vector<std::vector<Plant>> plants(spec.page_count);
  int plant_index = 0;
  for (int p = 0; p < spec.page_count; ++p) {
    std::mt19937_64 rng(splitmix64(spec.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(p)));
    char name[32];
    std::snprintf(name, sizeof(name), "page_%03d", p);

    Image page(spec.page_width, spec.page_height, 3);
    const int rule_offset = uniform_int(rng, 4, kRuleSpacing - 1);
    for (int y = 0; y < spec.page_height; ++y) {
      const bool rule = spec.ruled_lines && (y - rule_offset) % kRuleSpacing == 0;
      for (int x = 0; x < spec.page_width; ++x) {
        const double n = (2.0 * uniform01(rng) - 1.0) * spec.noise;
        for (int c = 0; c < 3; ++c) {
          page.at(x, y, c) = static_cast<float>(kPaper[c] + n - (rule ? kRuleDarkening : 0.0));
        }
      }
    }

    const int s = spec.glyph_size;
    for (int k = 0; k < spec.plants_per_page; ++k) {
      Plant plant{plant_index % spec.glyph_classes, 0, 0, {}};
      bool placed = false;
      for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
        plant.x = uniform_int(rng, kMargin, spec.page_width - s - kMargin);
        plant.y = uniform_int(rng, kMargin, spec.page_height - s - kMargin);
        const BoundingBox padded{plant.x - kMargin, plant.y - kMargin, s + 2 * kMargin,
                                 s + 2 * kMargin};
        placed = std::none_of(plants[p].begin(), plants[p].end(), [&](const Plant& o) {
          return intersection_area(padded, BoundingBox{o.x, o.y, s, s}) > 0;
        });
      }
      if (!placed) {
        fail(ErrorKind::kInvalidArgument,
             "cannot place " + std::to_string(spec.plants_per_page) + " glyphs on page " + name);
      }
      const Image& mask = masks[plant.glyph_class];
      for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
          const float m = mask.at(x, y);
          if (m <= 0.0f) continue;
          for (int c = 0; c < 3; ++c) {
            float& px = page.at(plant.x + x, plant.y + y, c);
            px = static_cast<float>(px * (1.0 - m) + kInk[c] * m);
          }
        }
      }
      const BoundingBox& ink = ink_boxes[plant.glyph_class];
      plant.ink_box = {plant.x + ink.x, plant.y + ink.y, ink.w, ink.h};
      plants[p].push_back(plant);
      ++plant_index;
    }
    quantize_8bit(page);
    corpus.pages.push_back({name, std::move(page), ""});
  }

  // One ground-truth query per requested instance of each class; every
  // query lists all plants of its class.
  for (int c = 0; c < spec.glyph_classes; ++c) {
    std::vector<std::pair<int, const Plant*>> instances;
    for (int p = 0; p < spec.page_count; ++p)
      for (const auto& plant : plants[p])
        if (plant.glyph_class == c) instances.emplace_back(p, &plant);
    const int nq = std::min<int>(spec.queries_per_class, static_cast<int>(instances.size()));
    for (int k = 0; k < nq; ++k) {
      const auto& [page_idx, src] = instances[k];
      GroundTruthQuery q;
      q.id = "q" + std::to_string(c) + "_" + std::to_string(k);
      q.page = corpus.pages[page_idx].id;
      q.bbox = src->ink_box;
      for (const auto& [p, plant] : instances) q.occurrences.push_back({corpus.pages[p].id, plant->ink_box});
      const Image& page = corpus.pages[page_idx].image;
      corpus.queries.push_back(
          {q.id, c, q.page, q.bbox, page.crop(q.bbox.x, q.bbox.y, q.bbox.w, q.bbox.h)});
      corpus.ground_truth.queries.push_back(std::move(q));
    }
  }
  return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "pages", ec);
  std::filesystem::create_directories(dir / "queries", ec);
  if (ec) fail(ErrorKind::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& p : corpus.pages) save_png(p.image, dir / "pages" / (p.id + ".png"));
  for (const auto& q : corpus.queries) save_png(q.crop, dir / "queries" / (q.id + ".png"));
  std::ofstream out(dir / "gt.json", std::ios::trunc);
  if (!out) fail(ErrorKind::kIoError, "cannot write " + (dir / "gt.json").string());
  out << ground_truth_to_json(corpus.ground_truth);
}

}  // namespace docspot
