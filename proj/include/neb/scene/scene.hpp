#pragma once

#include "neb/math/frame.hpp"
#include "neb/math/sampling.hpp"
#include "neb/math/types.hpp"
#include "neb/scene/bsdf.hpp"
#include "neb/scene/bvh.hpp"
#include "neb/scene/camera.hpp"
#include "neb/scene/light.hpp"
#include "neb/scene/shapes.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace neb {

struct Material {
  std::string name;
  Bsdf bsdf;
};

struct Intersection {
  SurfaceFrame frame;
  double distance = 0.0;
  int material = 0;
  int light = -1;                         // area light index if the surface emits
  Spectrum emitted = Spectrum::Zero();    // radiance toward wi
  Vector3 wi = Vector3::Zero();           // toward the ray origin
};

struct NeeSample {
  Vector3 direction = Vector3::Zero();   // from the surface toward the light
  Spectrum irradiance = Spectrum::Zero();  // dE, W/m^2, zero when occluded
  double light_pdf = 0.0;                // area density incl. pick probability
  bool light_delta = false;              // light_pdf is the residual of a Dirac
  double distance = 0.0;
  double cos_light = 0.0;                // at the light point, 1 for point lights
  bool occluded = false;
  int light = -1;
  Vector3 light_point = Vector3::Zero();
  Vector3 light_normal = Vector3::Zero();

  bool contributes() const { return !occluded && !is_black(irradiance); }
};

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Scene {
 public:
  std::vector<Material> materials;
  std::vector<Sphere> spheres;
  std::vector<Triangle> triangles;
  std::vector<Light> lights;
  PinholeCamera camera;

  int add_material(const std::string& name, const Bsdf& bsdf);
  void add_quad(const Vector3& corner, const Vector3& edge1, const Vector3& edge2, int material,
                int light = -1);
  /// Adds the light and its emitting geometry.
  void add_area_light(const AreaLight& light);

  /// Validates, computes bounds and builds the BVH. Throws SceneError.
  void finalize();

  const Aabb& bounds() const { return bounds_; }
  double scene_scale() const { return scale_; }
  double ray_epsilon() const { return 1e-4 * scale_; }

  std::optional<Intersection> intersect(const Ray& ray) const;
  std::optional<Intersection> intersect_brute_force(const Ray& ray) const;
  bool occluded(const Vector3& from, const Vector3& to) const;

  /// Ray leaving a surface point, offset against self-intersection.
  Ray spawn_ray(const Vector3& origin, const Vector3& direction) const {
    return Ray{origin, direction, ray_epsilon()};
  }

  NeeSample sample_nee(const SurfaceFrame& from, Sampler& sampler) const;

  double light_pick_pdf() const { return lights.empty() ? 0.0 : 1.0 / lights.size(); }
  /// Area density of NEE choosing this point on area light `light`.
  double light_area_pdf(int light) const;

  const Bsdf& bsdf(int material) const { return materials[material].bsdf; }

 private:
  Intersection make_intersection(const Ray& ray, int primitive, const ShapeHit& hit) const;
  double hit_primitive(int primitive, const Ray& ray, ShapeHit& out) const;

  Aabb bounds_;
  double scale_ = 1.0;
  Bvh bvh_;
};

}  // namespace neb
