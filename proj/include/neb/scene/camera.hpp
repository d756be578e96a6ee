#pragma once

#include "neb/math/types.hpp"

namespace neb {

struct PinholeCamera {
  Vector3 position = Vector3(0.0, 0.0, 1.0);
  Vector3 look_at = Vector3::Zero();
  Vector3 up = Vector3::UnitY();
  double vertical_fov = 40.0;  // degrees
  int width = 64;
  int height = 64;

  /// Primary ray through pixel (x, y) at subpixel offset `jitter` in [0,1)^2.
  /// Row 0 is the top of the image.
  Ray generate_ray(int x, int y, const Vector2& jitter) const {
    const Vector3 forward = (look_at - position).normalized();
    const Vector3 right = forward.cross(up).normalized();
    const Vector3 true_up = right.cross(forward);
    const double tan_half = std::tan(0.5 * vertical_fov * kPi / 180.0);
    const double aspect = static_cast<double>(width) / height;
    const double sx = (2.0 * (x + jitter.x()) / width - 1.0) * tan_half * aspect;
    const double sy = (1.0 - 2.0 * (y + jitter.y()) / height) * tan_half;
    return Ray{position, (forward + sx * right + sy * true_up).normalized()};
  }

  /// Pixel hit by the direction from the camera toward `p`, or false if
  /// `p` projects outside the image or lies behind the camera.
  bool project(const Vector3& p, int& x, int& y) const {
    const Vector3 forward = (look_at - position).normalized();
    const Vector3 right = forward.cross(up).normalized();
    const Vector3 true_up = right.cross(forward);
    const Vector3 d = p - position;
    const double z = d.dot(forward);
    if (z <= 0.0) return false;
    const double tan_half = std::tan(0.5 * vertical_fov * kPi / 180.0);
    const double aspect = static_cast<double>(width) / height;
    const double sx = d.dot(right) / z / (tan_half * aspect);
    const double sy = d.dot(true_up) / z / tan_half;
    const double fx = (sx + 1.0) * 0.5 * width;
    const double fy = (1.0 - sy) * 0.5 * height;
    if (fx < 0.0 || fy < 0.0 || fx >= width || fy >= height) return false;
    x = static_cast<int>(fx);
    y = static_cast<int>(fy);
    return true;
  }
};

}  // namespace neb
