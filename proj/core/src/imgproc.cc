#include "docspot/imgproc.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "docspot/error.h"

namespace docspot {

namespace {

// Ties in non-maximum suppression are decided on values that agree to
// this tolerance, so that float rounding cannot flip which side of a
// symmetric ridge survives.
constexpr double kTieEpsilon = 1e-9;

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Blur of one channel into a double buffer.
std::vector<double> blur_channel(const Image& img, int c, double sigma) {
  const int w = img.width(), h = img.height();
  std::vector<double> src(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) src[static_cast<std::size_t>(y) * w + x] = img.at(x, y, c);
  if (sigma <= 0.0) return src;

  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * src[static_cast<std::size_t>(y) * w + clampi(x + i, 0, w - 1)];
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  std::vector<double> out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

}  // namespace

Image to_grayscale(const Image& img) {
  if (img.channels() != 3) {
    fail(ErrorKind::kInvalidArgument,
         "to_grayscale expects a 3-channel image, got " +
             std::to_string(img.channels()) + " channel(s)");
  }
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                       0.114 * img.at(x, y, 2);
      out.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

Image ensure_grayscale(const Image& img) {
  return img.channels() == 1 ? img : to_grayscale(img);
}

Image gray_to_rgb(const Image& img) {
  if (img.channels() == 3) return img;
  Image out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y);
  return out;
}

Image resize_bilinear(const Image& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    fail(ErrorKind::kInvalidArgument, "resize target must be at least 1x1, got " +
                                          std::to_string(out_w) + "x" +
                                          std::to_string(out_h));
  }
  if (img.empty()) fail(ErrorKind::kInvalidArgument, "cannot resize an empty image");

  const int in_w = img.width(), in_h = img.height(), ch = img.channels();
  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int in, int out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / out;
    for (int i = 0; i < out; ++i) {
      double s = (i + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in - 1));
      const int i0 = static_cast<int>(std::floor(s));
      const int i1 = std::min(i0 + 1, in - 1);
      t[i] = {i0, i1, s - i0};
    }
    return t;
  };
  const auto tx = taps(in_w, out_w);
  const auto ty = taps(in_h, out_h);

  Image out(out_w, out_h, ch);
  for (int y = 0; y < out_h; ++y) {
    const Tap& vy = ty[y];
    for (int x = 0; x < out_w; ++x) {
      const Tap& vx = tx[x];
      for (int c = 0; c < ch; ++c) {
        const double top = img.at(vx.i0, vy.i0, c) * (1.0 - vx.f) +
                           img.at(vx.i1, vy.i0, c) * vx.f;
        const double bot = img.at(vx.i0, vy.i1, c) * (1.0 - vx.f) +
                           img.at(vx.i1, vy.i1, c) * vx.f;
        out.at(x, y, c) = static_cast<float>(top * (1.0 - vy.f) + bot * vy.f);
      }
    }
  }
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (sigma <= 0.0) return img;
  Image out(img.width(), img.height(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const auto b = blur_channel(img, c, sigma);
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out.at(x, y, c) = static_cast<float>(b[static_cast<std::size_t>(y) * img.width() + x]);
  }
  return out;
}

BinaryImage edge_binarize(const Image& gray, const EdgeParams& params) {
  if (gray.empty()) fail(ErrorKind::kInvalidArgument, "edge_binarize on empty image");
  if (gray.channels() != 1) {
    fail(ErrorKind::kInvalidArgument, "edge_binarize expects a grayscale image");
  }
  if (!(params.low >= 0.0 && params.low <= params.high && params.high <= 1.0)) {
    fail(ErrorKind::kInvalidArgument,
         "edge thresholds must satisfy 0 <= low <= high <= 1");
  }
  const int w = gray.width(), h = gray.height();
  const auto s = blur_channel(gray, 0, params.sigma);
  auto px = [&](int x, int y) {
    return s[static_cast<std::size_t>(clampi(y, 0, h - 1)) * w + clampi(x, 0, w - 1)];
  };

  const double norm = 4.0 * std::numbers::sqrt2;
  std::vector<double> mag(s.size());
  std::vector<std::uint8_t> dir(s.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mag[i] = std::hypot(gx, gy) / norm;
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0) angle += 180.0;
      // 0: horizontal gradient, 1: 45 deg, 2: vertical, 3: 135 deg.
      if (angle < 22.5 || angle >= 157.5) dir[i] = 0;
      else if (angle < 67.5) dir[i] = 1;
      else if (angle < 112.5) dir[i] = 2;
      else dir[i] = 3;
    }
  }

  static constexpr int kAhead[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  auto mag_at = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return mag[static_cast<std::size_t>(y) * w + x];
  };

  // 0 = suppressed, 1 = weak, 2 = strong.
  std::vector<std::uint8_t> cls(s.size(), 0);
  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = mag[i];
      if (m <= kTieEpsilon || m < params.low) continue;
      const auto [dx, dy] = kAhead[dir[i]];
      const double ahead = mag_at(x + dx, y + dy);
      const double behind = mag_at(x - dx, y - dy);
      if (!(m > behind + kTieEpsilon && m >= ahead - kTieEpsilon)) continue;
      if (m >= params.high) {
        cls[i] = 2;
        stack.push_back(static_cast<int>(i));
      } else {
        cls[i] = 1;
      }
    }
  }

  BinaryImage out(w, h);
  std::vector<std::uint8_t> seen(s.size(), 0);
  for (int i : stack) seen[i] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const int x = i % w, y = i / w;
    out.set(x, y, true);
    for (int ny = y - 1; ny <= y + 1; ++ny) {
      for (int nx = x - 1; nx <= x + 1; ++nx) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int j = ny * w + nx;
        if (cls[j] != 0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return out;
}

BinaryImage edge_binarize(const Image& gray, double low, double high) {
  EdgeParams p;
  p.low = low;
  p.high = high;
  return edge_binarize(gray, p);
}

double mean_intensity(const Image& img) {
  if (img.empty()) fail(ErrorKind::kInvalidArgument, "mean of an empty image");
  double sum = 0.0;
  for (float v : img.pixels()) sum += v;
  return sum / static_cast<double>(img.pixels().size());
}

double mean_intensity(const BinaryImage& img) {
  if (img.empty()) fail(ErrorKind::kInvalidArgument, "mean of an empty image");
  return static_cast<double>(img.count()) / static_cast<double>(img.bits().size());
}

double mean_intensity(const BinaryImage& img, int x0, int y0, int x1, int y1) {
  if (x1 <= x0 || y1 <= y0) fail(ErrorKind::kInvalidArgument, "mean of an empty window");
  std::size_t n = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) n += img.at(x, y) ? 1 : 0;
  return static_cast<double>(n) / (static_cast<double>(x1 - x0) * (y1 - y0));
}

}  // namespace docspot
