#include "neb/io/image.hpp"

#include <cmath>
#include <string>

namespace neb {

namespace {

void check_dimensions(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ImageError("image size mismatch: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                     " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

}  // namespace

double rmse(const Image& image, const Image& reference) {
  const std::vector<bool> all(static_cast<std::size_t>(image.width) * image.height, true);
  return rmse(image, reference, all);
}

double rmse(const Image& image, const Image& reference, const std::vector<bool>& mask) {
  check_dimensions(image, reference);
  if (mask.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw ImageError("mask size does not match the image");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    for (int c = 0; c < 3; ++c) {
      const double d = static_cast<double>(image.rgb[3 * p + c]) - reference.rgb[3 * p + c];
      sum += d * d;
    }
    count += 3;
  }
  return count > 0 ? std::sqrt(sum / count) : 0.0;
}

double mean_luminance(const Image& image) {
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    sum += 0.2126 * image.rgb[3 * p] + 0.7152 * image.rgb[3 * p + 1] + 0.0722 * image.rgb[3 * p + 2];
  }
  return sum / n;
}

}  // namespace neb
