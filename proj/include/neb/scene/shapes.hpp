#pragma once

#include "neb/math/types.hpp"

#include <array>
#include <optional>

namespace neb {

struct Sphere {
  Vector3 center = Vector3::Zero();
  double radius = 1.0;
  int material = 0;
};

struct Triangle {
  std::array<Vector3, 3> p;
  std::optional<std::array<Vector3, 3>> normals;  // per-vertex shading normals
  int material = 0;
  int light = -1;  // index of the area light this triangle belongs to

  Vector3 geometric_normal() const { return (p[1] - p[0]).cross(p[2] - p[0]).normalized(); }
  double area() const { return 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm(); }
};

struct ShapeHit {
  double t = 0.0;
  double b1 = 0.0;  // barycentrics for triangles
  double b2 = 0.0;
};

/// Both roots beyond tmin are considered so rays that start inside hit the
/// far side.
inline std::optional<ShapeHit> intersect(const Sphere& s, const Ray& ray) {
  const Vector3 oc = ray.origin - s.center;
  const double b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Numerically stable root pair.
  const double q = b > 0.0 ? -b - sq : -b + sq;
  double t0 = q;
  double t1 = q != 0.0 ? c / q : -b;
  if (t0 > t1) std::swap(t0, t1);
  if (t0 > ray.tmin && t0 < ray.tmax) return ShapeHit{t0};
  if (t1 > ray.tmin && t1 < ray.tmax) return ShapeHit{t1};
  return std::nullopt;
}

/// Moller-Trumbore.
inline std::optional<ShapeHit> intersect(const Triangle& tri, const Ray& ray) {
  const Vector3 e1 = tri.p[1] - tri.p[0];
  const Vector3 e2 = tri.p[2] - tri.p[0];
  const Vector3 pv = ray.direction.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const Vector3 tv = ray.origin - tri.p[0];
  const double u = tv.dot(pv) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vector3 qv = tv.cross(e1);
  const double v = ray.direction.dot(qv) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qv) * inv;
  if (t <= ray.tmin || t >= ray.tmax) return std::nullopt;
  return ShapeHit{t, u, v};
}

inline Aabb bounds(const Sphere& s) {
  const Vector3 r = Vector3::Constant(s.radius);
  return Aabb(s.center - r, s.center + r);
}

inline Aabb bounds(const Triangle& t) {
  Aabb b(t.p[0]);
  b.extend(t.p[1]);
  b.extend(t.p[2]);
  return b;
}

}  // namespace neb
