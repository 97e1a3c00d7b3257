#pragma once

#include <filesystem>

#include "docspot/image.h"

namespace docspot {

// Decodes PNG or JPEG (sniffed from the file signature). Alpha is dropped;
// 8-bit samples are scaled by 1/255, 16-bit samples by 1/65535.
Image load_image(const std::filesystem::path& path);

// Writes an 8-bit PNG with the image's channel count (1 or 3).
void save_png(const Image& img, const std::filesystem::path& path);

// Rounds every value to the nearest 8-bit level, so that save/load
// round-trips exactly.
void quantize_8bit(Image& img);

bool is_image_file(const std::filesystem::path& path);

}  // namespace docspot
