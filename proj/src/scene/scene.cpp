#include "neb/scene/scene.hpp"

#include <algorithm>
#include <cmath>

namespace neb {

int Scene::add_material(const std::string& name, const Bsdf& bsdf) {
  materials.push_back({name, bsdf});
  return static_cast<int>(materials.size()) - 1;
}

void Scene::add_quad(const Vector3& corner, const Vector3& edge1, const Vector3& edge2, int material,
                     int light) {
  const Vector3 p1 = corner + edge1;
  const Vector3 p2 = corner + edge1 + edge2;
  const Vector3 p3 = corner + edge2;
  triangles.push_back({{corner, p1, p2}, std::nullopt, material, light});
  triangles.push_back({{corner, p2, p3}, std::nullopt, material, light});
}

void Scene::add_area_light(const AreaLight& light) {
  auto it = std::find_if(materials.begin(), materials.end(),
                         [](const Material& m) { return m.name == "__emitter"; });
  int material = static_cast<int>(it - materials.begin());
  if (it == materials.end()) material = add_material("__emitter", Bsdf{Lambert{Spectrum::Zero()}});
  lights.push_back(light);
  add_quad(light.corner, light.edge1, light.edge2, material, static_cast<int>(lights.size()) - 1);
}

void Scene::finalize() {
  if (camera.width <= 0 || camera.height <= 0) throw SceneError("camera: resolution must be positive");
  if (!(camera.vertical_fov > 0.0 && camera.vertical_fov < 180.0)) {
    throw SceneError("camera: fov must be in (0, 180) degrees");
  }
  if ((camera.look_at - camera.position).norm() <= 0.0) {
    throw SceneError("camera: look_at coincides with position");
  }
  const int n_materials = static_cast<int>(materials.size());
  for (std::size_t i = 0; i < spheres.size(); ++i) {
    if (!(spheres[i].radius > 0.0)) throw SceneError("sphere " + std::to_string(i) + ": radius must be positive");
    if (spheres[i].material < 0 || spheres[i].material >= n_materials) {
      throw SceneError("sphere " + std::to_string(i) + ": invalid material");
    }
  }
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    if (triangles[i].material < 0 || triangles[i].material >= n_materials) {
      throw SceneError("triangle " + std::to_string(i) + ": invalid material");
    }
  }
  for (std::size_t i = 0; i < lights.size(); ++i) {
    const std::string name = "light " + std::to_string(i);
    if (const auto* a = std::get_if<AreaLight>(&lights[i])) {
      if (!(a->area() > 0.0)) throw SceneError(name + ": area light has zero area");
      if ((a->radiance < 0.0).any()) throw SceneError(name + ": negative radiance");
    } else if ((std::get<PointLight>(lights[i]).intensity < 0.0).any()) {
      throw SceneError(name + ": negative intensity");
    }
  }

  std::vector<Aabb> boxes;
  boxes.reserve(spheres.size() + triangles.size());
  for (const Sphere& s : spheres) boxes.push_back(neb::bounds(s));
  for (const Triangle& t : triangles) boxes.push_back(neb::bounds(t));
  bounds_ = Aabb();
  for (const Aabb& b : boxes) bounds_.extend(b);
  for (const Light& l : lights) {
    if (const auto* p = std::get_if<PointLight>(&l)) bounds_.extend(p->position);
  }
  if (bounds_.isEmpty()) bounds_ = Aabb(Vector3::Constant(-1.0), Vector3::Constant(1.0));
  // Flat scenes still need a volume for the octree.
  const Vector3 pad = Vector3::Constant(1e-3 * std::max(1e-9, bounds_.diagonal().norm()));
  bounds_.extend(bounds_.min() - pad);
  bounds_.extend(bounds_.max() + pad);
  scale_ = bounds_.diagonal().norm();
  bvh_ = Bvh(boxes);
}

double Scene::light_area_pdf(int light) const {
  const auto* a = std::get_if<AreaLight>(&lights[light]);
  return a ? light_pick_pdf() / a->area() : light_pick_pdf();
}

double Scene::hit_primitive(int primitive, const Ray& ray, ShapeHit& out) const {
  const int n_spheres = static_cast<int>(spheres.size());
  const std::optional<ShapeHit> h =
      primitive < n_spheres ? neb::intersect(spheres[primitive], ray)
                            : neb::intersect(triangles[primitive - n_spheres], ray);
  if (!h) return -1.0;
  out = *h;
  return h->t;
}

Intersection Scene::make_intersection(const Ray& ray, int primitive, const ShapeHit& hit) const {
  Intersection its;
  its.distance = hit.t;
  its.wi = -ray.direction;
  const Vector3 p = ray.at(hit.t);
  const int n_spheres = static_cast<int>(spheres.size());
  if (primitive < n_spheres) {
    const Sphere& s = spheres[primitive];
    its.frame = SurfaceFrame::from_normal(p, (p - s.center).normalized());
    its.material = s.material;
    return its;
  }
  const Triangle& t = triangles[primitive - n_spheres];
  const Vector3 ng = t.geometric_normal();
  Vector3 ns = ng;
  if (t.normals) {
    const auto& n = *t.normals;
    ns = ((1.0 - hit.b1 - hit.b2) * n[0] + hit.b1 * n[1] + hit.b2 * n[2]).normalized();
  }
  its.frame = SurfaceFrame::from_normals(p, ng, ns);
  its.material = t.material;
  its.light = t.light;
  if (t.light >= 0) {
    its.emitted = emitted_radiance(std::get<AreaLight>(lights[t.light]), its.wi);
  }
  return its;
}

std::optional<Intersection> Scene::intersect(const Ray& ray) const {
  Ray r = ray;
  int best = -1;
  ShapeHit best_hit;
  bvh_.traverse(r, [&](int primitive, const Ray& cur) {
    ShapeHit h;
    const double t = hit_primitive(primitive, cur, h);
    if (t >= 0.0 && t < cur.tmax) {
      best = primitive;
      best_hit = h;
    }
    return t;
  });
  if (best < 0) return std::nullopt;
  return make_intersection(ray, best, best_hit);
}

std::optional<Intersection> Scene::intersect_brute_force(const Ray& ray) const {
  Ray r = ray;
  int best = -1;
  ShapeHit best_hit;
  const int n = static_cast<int>(spheres.size() + triangles.size());
  for (int i = 0; i < n; ++i) {
    ShapeHit h;
    const double t = hit_primitive(i, r, h);
    if (t >= 0.0 && t < r.tmax) {
      r.tmax = t;
      best = i;
      best_hit = h;
    }
  }
  if (best < 0) return std::nullopt;
  return make_intersection(ray, best, best_hit);
}

bool Scene::occluded(const Vector3& from, const Vector3& to) const {
  const Vector3 d = to - from;
  const double dist = d.norm();
  const double eps = ray_epsilon();
  if (dist <= 2.0 * eps) return false;
  Ray r{from, d / dist, eps, dist - eps};
  ShapeHit h;
  return bvh_.traverse(r, [&](int primitive, const Ray& cur) { return hit_primitive(primitive, cur, h); },
                       true);
}

NeeSample Scene::sample_nee(const SurfaceFrame& from, Sampler& sampler) const {
  NeeSample s;
  if (lights.empty()) return s;
  const int n = static_cast<int>(lights.size());
  const int index = std::min(n - 1, static_cast<int>(sampler.next_1d() * n));
  const Light& light = lights[index];
  const LightPointSample point = sample_point(light, sampler.next_2d());
  s.light = index;
  s.light_point = point.position;
  s.light_normal = point.normal;
  s.light_delta = is_delta_light(light);
  s.light_pdf = light_pick_pdf() * point.pdf_area;
  const Vector3 to = point.position - from.position;
  s.distance = to.norm();
  if (s.distance <= 0.0) return s;
  s.direction = to / s.distance;
  const double cos_surface = std::abs(from.cos_shading(s.direction));
  Spectrum unshadowed;
  if (const auto* p = std::get_if<PointLight>(&light)) {
    s.cos_light = 1.0;
    unshadowed = p->intensity * (cos_surface / (s.distance * s.distance * s.light_pdf));
  } else {
    const auto& a = std::get<AreaLight>(light);
    s.cos_light = -point.normal.dot(s.direction);
    if (s.cos_light <= 0.0) return s;
    unshadowed = a.radiance * (s.cos_light * cos_surface / (s.distance * s.distance * s.light_pdf));
  }
  s.occluded = occluded(from.position, point.position);
  if (!s.occluded) s.irradiance = unshadowed;
  return s;
}

}  // namespace neb
