#pragma once

#include "docspot/image.h"

namespace docspot {

// Luminance 0.299 R + 0.587 G + 0.114 B. Rejects 1-channel input.
Image to_grayscale(const Image& img);

// Returns img unchanged when it is already single-channel.
Image ensure_grayscale(const Image& img);

// Replicates a gray image into three identical channels.
Image gray_to_rgb(const Image& img);

// Center-aligned bilinear resampling: output pixel i samples source
// coordinate (i + 0.5) * in / out - 0.5, clamped to the valid range.
Image resize_bilinear(const Image& img, int out_w, int out_h);

// Separable Gaussian blur with replicate borders. sigma <= 0 is a no-op.
Image gaussian_blur(const Image& img, double sigma);

struct EdgeParams {
  double sigma = 1.0;
  double low = 0.1;
  double high = 0.2;
};

// Canny-style edge map: Gaussian smoothing, 3x3 Sobel gradients,
// non-maximum suppression along the quantized gradient direction and
// double-threshold hysteresis. Gradient magnitude is normalized by the
// largest magnitude Sobel can produce on a [0,1] image (4 * sqrt(2)), so
// the thresholds are absolute rather than relative to the image content.
BinaryImage edge_binarize(const Image& gray, const EdgeParams& params);
BinaryImage edge_binarize(const Image& gray, double low, double high);

double mean_intensity(const Image& img);
double mean_intensity(const BinaryImage& img);

// Mean over the window [x0, x1) x [y0, y1).
double mean_intensity(const BinaryImage& img, int x0, int y0, int x1, int y1);

}  // namespace docspot
