#include "neb/io/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace neb {

unsigned char tonemap_channel(float linear) {
  double v = std::max(0.0, static_cast<double>(linear));
  if (!std::isfinite(v)) v = 0.0;
  v = v / (1.0 + v);
  v = v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
  // Truncation keeps every finite input strictly below full white.
  return static_cast<unsigned char>(std::clamp(std::floor(v * 255.0), 0.0, 255.0));
}

namespace {

// Kept free of objects with destructors: libpng reports errors by longjmp.
bool encode(png_structp png, png_infop info, FILE* file, const Image& image, unsigned char* row) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int n = image.width * 3;
  for (int y = 0; y < image.height; ++y) {
    const float* src = image.pixel(0, y);
    for (int i = 0; i < n; ++i) row[i] = tonemap_channel(src[i]);
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

void write_tonemapped_png(const Image& image, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw ImageError(path.string() + ": cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw ImageError("libpng initialization failed");
  }
  std::vector<unsigned char> row(static_cast<std::size_t>(image.width) * 3);
  const bool ok = encode(png, info, file.get(), image, row.data());
  png_destroy_write_struct(&png, &info);
  if (!ok) throw ImageError(path.string() + ": PNG encoding failed");
}

}  // namespace neb
