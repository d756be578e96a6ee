#pragma once

#include "neb/io/image.hpp"
#include "neb/math/types.hpp"

#include <vector>

namespace neb {

/// Running sum of per-iteration radiance estimates.
class FrameBuffer {
 public:
  FrameBuffer() = default;
  FrameBuffer(int width, int height)
      : width_(width), height_(height), sum_(static_cast<std::size_t>(width) * height, Spectrum::Zero()) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int pixel_count() const { return width_ * height_; }
  int iterations() const { return iterations_; }

  /// Adds one iteration's worth of contributions, indexed by pixel.
  void accumulate(const std::vector<Spectrum>& contributions) {
    for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += contributions[i];
  }
  void finish_iteration() { ++iterations_; }

  Spectrum pixel(int x, int y) const {
    return iterations_ > 0 ? Spectrum(sum_[static_cast<std::size_t>(y) * width_ + x] / iterations_)
                           : Spectrum::Zero();
  }

  Image image() const {
    Image img(width_, height_);
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const Spectrum v = pixel(x, y);
        float* p = img.pixel(x, y);
        for (int c = 0; c < 3; ++c) p[c] = static_cast<float>(v[c]);
      }
    }
    return img;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int iterations_ = 0;
  std::vector<Spectrum> sum_;
};

/// Per-thread splat targets, summed in thread order after a pass.
class SplatBuffers {
 public:
  SplatBuffers(int threads, int pixels)
      : buffers_(threads, std::vector<Spectrum>(pixels, Spectrum::Zero())) {}

  void add(int thread, int pixel, const Spectrum& value) { buffers_[thread][pixel] += value; }

  std::vector<Spectrum> reduce() const {
    std::vector<Spectrum> out = buffers_[0];
    for (std::size_t t = 1; t < buffers_.size(); ++t) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += buffers_[t][i];
    }
    return out;
  }

 private:
  std::vector<std::vector<Spectrum>> buffers_;
};

}  // namespace neb
