#pragma once

#include "neb/math/frame.hpp"
#include "neb/math/sampling.hpp"
#include "neb/math/types.hpp"

#include <variant>

namespace neb {

struct PointLight {
  Vector3 position = Vector3::Zero();
  Spectrum intensity = Spectrum::Ones();  // W/sr
};

/// Parallelogram emitter, radiating from the side of edge1 x edge2.
struct AreaLight {
  Vector3 corner = Vector3::Zero();
  Vector3 edge1 = Vector3::UnitX();
  Vector3 edge2 = Vector3::UnitY();
  Spectrum radiance = Spectrum::Ones();  // W/(m^2 sr)

  Vector3 normal() const { return edge1.cross(edge2).normalized(); }
  double area() const { return edge1.cross(edge2).norm(); }
};

using Light = std::variant<PointLight, AreaLight>;

inline bool is_delta_light(const Light& l) { return std::holds_alternative<PointLight>(l); }

/// Radiance leaving an area light toward `w` (unit, away from the light).
inline Spectrum emitted_radiance(const AreaLight& l, const Vector3& w) {
  return l.normal().dot(w) > 0.0 ? l.radiance : Spectrum::Zero();
}

struct LightPointSample {
  Vector3 position = Vector3::Zero();
  Vector3 normal = Vector3::Zero();  // zero for point lights
  double pdf_area = 0.0;             // without the light pick probability
};

inline LightPointSample sample_point(const Light& light, const Vector2& u) {
  if (const auto* p = std::get_if<PointLight>(&light)) return {p->position, Vector3::Zero(), 1.0};
  const auto& a = std::get<AreaLight>(light);
  return {a.corner + u.x() * a.edge1 + u.y() * a.edge2, a.normal(), 1.0 / a.area()};
}

/// Photon leaving a light, for conventional light tracing.
struct EmissionSample {
  Vector3 position = Vector3::Zero();
  Vector3 normal = Vector3::Zero();
  Vector3 direction = Vector3::Zero();
  Spectrum flux = Spectrum::Zero();  // emitted power estimate, W
  double pdf_area = 0.0;             // includes the light pick probability
  double pdf_direction = 0.0;        // 1/sr
  bool delta_position = false;
};

inline EmissionSample sample_emission(const Light& light, double pick_pdf, const Vector2& u_pos,
                                      const Vector2& u_dir) {
  EmissionSample s;
  if (const auto* p = std::get_if<PointLight>(&light)) {
    s.position = p->position;
    s.direction = square_to_uniform_sphere(u_dir);
    s.pdf_area = pick_pdf;
    s.pdf_direction = uniform_sphere_pdf();
    s.flux = p->intensity / (pick_pdf * s.pdf_direction);
    s.delta_position = true;
    return s;
  }
  const auto& a = std::get<AreaLight>(light);
  const LightPointSample point = sample_point(light, u_pos);
  const SurfaceFrame frame = SurfaceFrame::from_normal(point.position, point.normal);
  const Vector3 local = square_to_cosine_hemisphere(u_dir);
  s.position = point.position;
  s.normal = point.normal;
  s.direction = frame.to_world(local).normalized();
  s.pdf_area = pick_pdf * point.pdf_area;
  s.pdf_direction = cosine_hemisphere_pdf(local.z());
  // L cos / (p_A p_w) with p_w = cos / pi
  s.flux = a.radiance * (kPi / s.pdf_area);
  return s;
}

/// Density of emitting toward `w` from a light point, per solid angle.
inline double emission_direction_pdf(const Light& light, const Vector3& normal, const Vector3& w) {
  if (std::holds_alternative<PointLight>(light)) return uniform_sphere_pdf();
  return cosine_hemisphere_pdf(normal.dot(w));
}

}  // namespace neb
