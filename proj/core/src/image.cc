#include "docspot/image.h"

#include <algorithm>
#include <string>

#include "docspot/error.h"

namespace docspot {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kDataError: return "data error";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kTruncatedFile: return "truncated file";
    case ErrorKind::kBadMagic: return "unknown magic header";
    case ErrorKind::kEmptyIndex: return "empty index";
    case ErrorKind::kProfileMismatch: return "profile mismatch";
    case ErrorKind::kIoError: return "i/o error";
    case ErrorKind::kInternal: return "internal error";
  }
  return "unknown";
}

namespace {

void check_shape(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    fail(ErrorKind::kInvalidArgument,
         "image dimensions must be positive, got " + std::to_string(width) +
             "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    fail(ErrorKind::kInvalidArgument,
         "image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

}  // namespace

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  pixels_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<float> pixels)
    : width_(width), height_(height), channels_(channels),
      pixels_(std::move(pixels)) {
  check_shape(width, height, channels);
  if (pixels_.size() != static_cast<std::size_t>(width) * height * channels) {
    fail(ErrorKind::kInvalidArgument, "pixel buffer size does not match shape");
  }
}

Image Image::crop(int x, int y, int w, int h) const {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > width_ || y + h > height_) {
    fail(ErrorKind::kInvalidArgument, "crop window outside image");
  }
  Image out(w, h, channels_);
  const std::size_t row = static_cast<std::size_t>(w) * channels_;
  for (int r = 0; r < h; ++r) {
    const float* src = &pixels_[(static_cast<std::size_t>(y + r) * width_ + x) * channels_];
    std::copy(src, src + row, &out.pixels_[static_cast<std::size_t>(r) * row]);
  }
  return out;
}

BinaryImage::BinaryImage(int width, int height)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    fail(ErrorKind::kInvalidArgument, "binary image dimensions must be positive");
  }
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 1 || height < 1 ||
      bits_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorKind::kInvalidArgument, "binary image size does not match shape");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

}  // namespace docspot
