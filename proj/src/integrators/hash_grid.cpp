#include "neb/integrators/hash_grid.hpp"

#include <bit>
#include <stdexcept>

namespace neb {

void VertexHashGrid::build(const std::vector<Vector3>& positions, const Aabb& bounds, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("VertexHashGrid: radius must be positive");
  radius_ = radius;
  inv_cell_ = 1.0 / radius;
  origin_ = bounds.min();
  positions_ = &positions;
  const std::size_t buckets = std::bit_ceil(std::max<std::size_t>(16, 2 * positions.size()));
  bucket_start_.assign(buckets + 1, 0);
  entries_.resize(positions.size());

  std::vector<CellKey> keys(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto c = cell_of(positions[i]);
    keys[i] = key(c.x(), c.y(), c.z());
    ++bucket_start_[bucket(keys[i]) + 1];
  }
  for (std::size_t b = 0; b < buckets; ++b) bucket_start_[b + 1] += bucket_start_[b];
  std::vector<std::uint32_t> fill(bucket_start_.begin(), bucket_start_.end() - 1);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    entries_[fill[bucket(keys[i])]++] = {keys[i], static_cast<int>(i)};
  }
}

}  // namespace neb
