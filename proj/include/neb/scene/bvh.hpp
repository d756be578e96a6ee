#pragma once

#include "neb/math/types.hpp"

#include <cstdint>
#include <vector>

namespace neb {

/// Binary bounding volume hierarchy over primitive boxes. Built by median
/// split of centroids along the widest axis, at most kLeafSize primitives
/// per leaf.
class Bvh {
 public:
  static constexpr int kLeafSize = 4;

  struct Node {
    Aabb box;
    std::int32_t first = 0;  // leaf: first primitive in order(); inner: right child
    std::int32_t count = 0;  // 0 for inner nodes; left child is the next node
  };

  Bvh() = default;
  explicit Bvh(const std::vector<Aabb>& primitive_bounds);

  /// Calls `hit(primitive, ray)` for candidate primitives in roughly
  /// front-to-back order. `hit` returns the hit distance or a negative value
  /// on miss, and the traversal shrinks ray.tmax to the closest hit. With
  /// `any_hit` the traversal stops at the first hit.
  template <typename HitFn>
  bool traverse(Ray& ray, HitFn&& hit, bool any_hit = false) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& order() const { return order_; }

 private:
  int build(const std::vector<Aabb>& boxes, const std::vector<Vector3>& centroids, int begin, int end);

  std::vector<Node> nodes_;
  std::vector<int> order_;
};

namespace detail {

inline bool slab_test(const Aabb& box, const Vector3& origin, const Vector3& inv_dir, double tmin,
                      double tmax, double& entry) {
  for (int a = 0; a < 3; ++a) {
    double t0 = (box.min()[a] - origin[a]) * inv_dir[a];
    double t1 = (box.max()[a] - origin[a]) * inv_dir[a];
    if (t0 > t1) std::swap(t0, t1);
    // NaN from 0 * inf leaves the interval untouched.
    if (t0 > tmin) tmin = t0;
    if (t1 < tmax) tmax = t1;
    if (tmin > tmax) return false;
  }
  entry = tmin;
  return true;
}

}  // namespace detail

template <typename HitFn>
bool Bvh::traverse(Ray& ray, HitFn&& hit, bool any_hit) const {
  if (nodes_.empty()) return false;
  const Vector3 inv_dir = ray.direction.cwiseInverse();
  bool found = false;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double entry;
    if (!detail::slab_test(node.box, ray.origin, inv_dir, ray.tmin, ray.tmax, entry)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const double t = hit(order_[i], ray);
        if (t >= 0.0 && t < ray.tmax) {
          ray.tmax = t;
          found = true;
          if (any_hit) return true;
        }
      }
      continue;
    }
    const int left = static_cast<int>(&node - nodes_.data()) + 1;
    const int right = node.first;
    // Visit the child on the ray's near side first.
    double el, er;
    const bool hl = detail::slab_test(nodes_[left].box, ray.origin, inv_dir, ray.tmin, ray.tmax, el);
    const bool hr = detail::slab_test(nodes_[right].box, ray.origin, inv_dir, ray.tmin, ray.tmax, er);
    if (hl && hr) {
      if (el < er) {
        stack[top++] = right;
        stack[top++] = left;
      } else {
        stack[top++] = left;
        stack[top++] = right;
      }
    } else if (hl) {
      stack[top++] = left;
    } else if (hr) {
      stack[top++] = right;
    }
  }
  return found;
}

}  // namespace neb
