#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <numbers>

namespace neb {

using Vector3 = Eigen::Vector3d;
using Vector2 = Eigen::Vector2d;
using Aabb = Eigen::AlignedBox3d;

// Linear RGB radiometric quantity.
using Spectrum = Eigen::Array3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvPi = 1.0 / std::numbers::pi;

inline double luminance(const Spectrum& s) {
  return 0.2126 * s[0] + 0.7152 * s[1] + 0.0722 * s[2];
}

inline bool is_black(const Spectrum& s) { return (s <= 0.0).all(); }

inline bool is_finite(const Spectrum& s) { return s.isFinite().all(); }

inline double sqr(double x) { return x * x; }

struct Ray {
  Vector3 origin;
  Vector3 direction;  // unit length
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();

  Vector3 at(double t) const { return origin + t * direction; }
};

// Mirror `v` about `n`; both point away from the surface.
inline Vector3 reflect(const Vector3& v, const Vector3& n) {
  return 2.0 * v.dot(n) * n - v;
}

}  // namespace neb
