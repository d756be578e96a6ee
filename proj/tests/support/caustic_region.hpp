#pragma once

// Pixels of the caustic_sphere fixture that see the floor around the point
// where the ray from the light center through the sphere center lands.

#include "neb/scene/scene.hpp"

#include <variant>
#include <vector>

namespace neb::testing {

inline Vector3 caustic_center(const Scene& scene) {
  const auto& light = std::get<AreaLight>(scene.lights.at(0));
  const Vector3 from = light.corner + 0.5 * (light.edge1 + light.edge2);
  const Vector3 through = scene.spheres.at(0).center;
  const Vector3 d = through - from;
  return from + d * (-from.y() / d.y());
}

inline std::vector<bool> caustic_mask(const Scene& scene, double radius = 0.4) {
  const PinholeCamera& cam = scene.camera;
  const Vector3 center = caustic_center(scene);
  std::vector<bool> mask(static_cast<std::size_t>(cam.width) * cam.height, false);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const auto its = scene.intersect(cam.generate_ray(x, y, Vector2(0.5, 0.5)));
      if (!its || std::abs(its->frame.position.y()) > 1e-6) continue;
      mask[static_cast<std::size_t>(y) * cam.width + x] = (its->frame.position - center).norm() <= radius;
    }
  }
  return mask;
}

}  // namespace neb::testing
