#pragma once

#include "neb/math/types.hpp"

#include <cstdint>
#include <vector>

namespace neb {

/// Uniform grid with cell size equal to the query radius, stored as a hash
/// table of cells. A query visits the 27 cells around the query point.
class VertexHashGrid {
 public:
  VertexHashGrid() = default;

  /// Keeps a reference to `positions`, which must outlive the queries.
  void build(const std::vector<Vector3>& positions, const Aabb& bounds, double radius);
  void build(std::vector<Vector3>&&, const Aabb&, double) = delete;

  /// Calls visit(index) for every stored point within `radius` (inclusive).
  template <typename Visit>
  void query(const Vector3& p, Visit&& visit) const;

  double radius() const { return radius_; }
  std::size_t size() const { return entries_.size(); }

 private:
  using CellKey = std::uint64_t;

  CellKey key(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return (static_cast<std::uint64_t>(x) & 0x1fffff) | ((static_cast<std::uint64_t>(y) & 0x1fffff) << 21) |
           ((static_cast<std::uint64_t>(z) & 0x1fffff) << 42);
  }
  std::size_t bucket(CellKey k) const {
    return static_cast<std::size_t>((k * 0x9e3779b97f4a7c15ULL) >> 20) & (bucket_start_.size() - 2);
  }
  Eigen::Matrix<std::int64_t, 3, 1> cell_of(const Vector3& p) const {
    return ((p - origin_) * inv_cell_).array().floor().cast<std::int64_t>();
  }

  struct Entry {
    CellKey cell;
    int index;
  };

  double radius_ = 0.0;
  double inv_cell_ = 0.0;
  Vector3 origin_ = Vector3::Zero();
  const std::vector<Vector3>* positions_ = nullptr;
  std::vector<std::uint32_t> bucket_start_;  // power-of-two buckets + 1
  std::vector<Entry> entries_;
};

template <typename Visit>
void VertexHashGrid::query(const Vector3& p, Visit&& visit) const {
  if (entries_.empty()) return;
  const auto c = cell_of(p);
  const double r2 = radius_ * radius_;
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const CellKey k = key(c.x() + dx, c.y() + dy, c.z() + dz);
        const std::size_t b = bucket(k);
        for (std::uint32_t i = bucket_start_[b]; i < bucket_start_[b + 1]; ++i) {
          const Entry& e = entries_[i];
          // Buckets mix cells; the key check keeps each point visited once.
          if (e.cell != k) continue;
          if (((*positions_)[e.index] - p).squaredNorm() <= r2) visit(e.index);
        }
      }
    }
  }
}

}  // namespace neb
