#include "docspot/image_io.h"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "docspot/error.h"

namespace docspot {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open image " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

Image decode_png(const std::vector<unsigned char>& bytes,
                 const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    fail(ErrorKind::kDataError, "cannot decode PNG " + path.string() + ": " + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool wide = (png.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  const int channels = color ? 3 : 1;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (wide) png.format |= PNG_FORMAT_FLAG_LINEAR;

  const std::size_t count = static_cast<std::size_t>(png.width) * png.height * channels;
  std::vector<float> pixels(count);
  if (wide) {
    std::vector<png_uint_16> buf(count);
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
      fail(ErrorKind::kDataError, "cannot decode PNG " + path.string() + ": " + png.message);
    }
    for (std::size_t i = 0; i < count; ++i) pixels[i] = buf[i] / 65535.0f;
  } else {
    std::vector<png_byte> buf(count);
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
      fail(ErrorKind::kDataError, "cannot decode PNG " + path.string() + ": " + png.message);
    }
    for (std::size_t i = 0; i < count; ++i) pixels[i] = buf[i] / 255.0f;
  }
  return Image(static_cast<int>(png.width), static_cast<int>(png.height), channels,
               std::move(pixels));
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_jpeg_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Image decode_jpeg(const std::vector<unsigned char>& bytes,
                  const std::filesystem::path& path) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = on_jpeg_error;
  // Everything touched after setjmp lives in plain buffers sized up front.
  std::vector<float> pixels;
  std::vector<JSAMPLE> row;
  int width = 0, height = 0, channels = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(ErrorKind::kDataError,
         "cannot decode JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  channels = cinfo.output_components;
  pixels.resize(static_cast<std::size_t>(width) * height * channels);
  row.resize(static_cast<std::size_t>(width) * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW rows[1] = {row.data()};
    const std::size_t y = cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, rows, 1);
    for (std::size_t i = 0; i < row.size(); ++i) pixels[y * row.size() + i] = row[i] / 255.0f;
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return Image(width, height, channels, std::move(pixels));
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  static constexpr std::array<unsigned char, 8> kPng = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= kPng.size() && std::equal(kPng.begin(), kPng.end(), bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) {
    return decode_jpeg(bytes, path);
  }
  fail(ErrorKind::kDataError, "unsupported image format: " + path.string());
}

void save_png(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) fail(ErrorKind::kInvalidArgument, "cannot save an empty image");
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(img.pixels().size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] = static_cast<png_byte>(
        std::lround(std::clamp(img.pixels()[i], 0.0f, 1.0f) * 255.0f));
  }
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) fail(ErrorKind::kIoError, "cannot write " + path.string());
  if (!png_image_write_to_stdio(&png, f.get(), 0, buf.data(), 0, nullptr)) {
    fail(ErrorKind::kIoError, "cannot encode PNG " + path.string() + ": " + png.message);
  }
}

void quantize_8bit(Image& img) {
  for (float& v : img.pixels()) {
    v = static_cast<float>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)) / 255.0f;
  }
}

bool is_image_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace docspot
