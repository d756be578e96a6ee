#pragma once

#include "neb/math/types.hpp"

namespace neb {

/// Orthonormal basis around a normal (Duff et al. branchless construction).
inline void coordinate_system(const Vector3& n, Vector3& u, Vector3& v) {
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double b = n.x() * n.y() * a;
  u = Vector3(1.0 + sign * n.x() * n.x() * a, sign * b, -sign * n.x());
  v = Vector3(b, sign + n.y() * n.y() * a, -n.y());
}

/// Local shading frame at a surface point. The geometric normal is the
/// outward normal of the shape, never flipped toward the viewer.
struct SurfaceFrame {
  Vector3 position = Vector3::Zero();
  Vector3 geometric_normal = Vector3::UnitZ();
  Vector3 shading_normal = Vector3::UnitZ();
  Vector3 tangent_u = Vector3::UnitX();
  Vector3 tangent_v = Vector3::UnitY();

  static SurfaceFrame from_normals(const Vector3& position, const Vector3& geometric_normal,
                                   const Vector3& shading_normal) {
    SurfaceFrame f;
    f.position = position;
    f.geometric_normal = geometric_normal;
    f.shading_normal = shading_normal;
    coordinate_system(shading_normal, f.tangent_u, f.tangent_v);
    return f;
  }

  static SurfaceFrame from_normal(const Vector3& position, const Vector3& normal) {
    return from_normals(position, normal, normal);
  }

  Vector3 to_local(const Vector3& w) const {
    return {w.dot(tangent_u), w.dot(tangent_v), w.dot(shading_normal)};
  }

  Vector3 to_world(const Vector3& w) const {
    return w.x() * tangent_u + w.y() * tangent_v + w.z() * shading_normal;
  }

  double cos_shading(const Vector3& w) const { return w.dot(shading_normal); }
  double cos_geometric(const Vector3& w) const { return w.dot(geometric_normal); }
};

}  // namespace neb
