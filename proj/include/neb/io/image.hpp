#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace neb {

/// Linear RGB float image, row 0 at the top, channels interleaved.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0.0f) {}

  float* pixel(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const float* pixel(int x, int y) const {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
};

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Portable Float Map ("PF", little-endian, bottom-up rows).
void write_pfm(const Image& image, const std::filesystem::path& path);
/// Throws ImageError naming the byte offset of malformed or truncated data.
Image read_pfm(const std::filesystem::path& path);

/// Root mean squared difference over all pixels and channels.
double rmse(const Image& image, const Image& reference);
/// Same, restricted to pixels with mask[y * width + x] set.
double rmse(const Image& image, const Image& reference, const std::vector<bool>& mask);

double mean_luminance(const Image& image);

/// Reinhard tone mapping followed by sRGB encoding to an 8-bit PNG.
void write_tonemapped_png(const Image& image, const std::filesystem::path& path);
/// The 8-bit value the PNG writer stores for a linear channel value.
unsigned char tonemap_channel(float linear);

}  // namespace neb
