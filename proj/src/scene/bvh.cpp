#include "neb/scene/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace neb {

Bvh::Bvh(const std::vector<Aabb>& primitive_bounds) {
  if (primitive_bounds.empty()) return;
  order_.resize(primitive_bounds.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::vector<Vector3> centroids;
  centroids.reserve(primitive_bounds.size());
  for (const Aabb& b : primitive_bounds) centroids.push_back(b.center());
  nodes_.reserve(2 * primitive_bounds.size());
  build(primitive_bounds, centroids, 0, static_cast<int>(order_.size()));
}

int Bvh::build(const std::vector<Aabb>& boxes, const std::vector<Vector3>& centroids, int begin, int end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Aabb box;
  Aabb centroid_box;
  for (int i = begin; i < end; ++i) {
    box.extend(boxes[order_[i]]);
    centroid_box.extend(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  const int n = end - begin;
  const Vector3 extent = centroid_box.sizes();
  int axis;
  extent.maxCoeff(&axis);
  if (n <= kLeafSize || extent[axis] <= 0.0) {
    nodes_[index].first = begin;
    nodes_[index].count = n;
    return index;
  }
  const int mid = begin + n / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return centroids[a][axis] < centroids[b][axis]; });
  build(boxes, centroids, begin, mid);
  const int right = build(boxes, centroids, mid, end);
  nodes_[index].first = right;
  nodes_[index].count = 0;
  return index;
}

}  // namespace neb
