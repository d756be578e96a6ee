#pragma once

#include "neb/math/types.hpp"

#include <cstdint>
#include <random>

namespace neb {

/// Hash of a (seed, a, b) triple into a 64-bit stream seed.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL);
  h = mix(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix(h ^ (b + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform random numbers for one independent sample stream.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double next_1d() {
    // 53 random mantissa bits, result in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  Vector2 next_2d() {
    const double u = next_1d();
    return {u, next_1d()};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Warps from the unit square. Directions are in a local frame with z up.

inline Vector3 square_to_cosine_hemisphere(const Vector2& u) {
  const double r = std::sqrt(u.x());
  const double phi = 2.0 * kPi * u.y();
  return {r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u.x()))};
}

inline double cosine_hemisphere_pdf(double cos_theta) {
  return cos_theta > 0.0 ? cos_theta * kInvPi : 0.0;
}

inline Vector3 square_to_uniform_sphere(const Vector2& u) {
  const double z = 1.0 - 2.0 * u.x();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * kPi * u.y();
  return {r * std::cos(phi), r * std::sin(phi), z};
}

inline constexpr double uniform_sphere_pdf() { return 1.0 / (4.0 * kPi); }

/// Lobe proportional to cos^exponent around +z.
inline Vector3 square_to_power_cosine(const Vector2& u, double exponent) {
  const double cos_theta = std::pow(u.x(), 1.0 / (exponent + 1.0));
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * kPi * u.y();
  return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
}

inline double power_cosine_pdf(double cos_theta, double exponent) {
  return cos_theta > 0.0 ? (exponent + 1.0) / (2.0 * kPi) * std::pow(cos_theta, exponent) : 0.0;
}

/// Convert a solid-angle density at the source into an area density at the
/// target point.
inline double solid_angle_to_area_pdf(double pdf_solid_angle, double distance, double cos_at_target) {
  return pdf_solid_angle * std::abs(cos_at_target) / (distance * distance);
}

}  // namespace neb
