#include "neb/octree/density_octree.hpp"

#include "neb/math/plane_box.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace neb {

namespace {

void atomic_max(std::atomic<int>& a, int b) {
  int old_value = a.load();
  while (old_value < b && !a.compare_exchange_weak(old_value, b)) {
  }
}

}  // namespace

DensityOctree::DensityOctree(const Vector3& scene_min, const Vector3& scene_max, int capacity) {
  if (!(scene_max.array() > scene_min.array()).all()) {
    throw std::invalid_argument("DensityOctree: scene bounds must have positive extent");
  }
  if (capacity < 9) {
    throw std::invalid_argument("DensityOctree: capacity must be at least 9");
  }
  // Slightly enlarge the volume so points on the boundary stay inside.
  scene_size_ = (scene_max - scene_min) * 1.002;
  scene_size_inv_ = scene_size_.cwiseInverse();
  scene_scale_ = scene_size_.norm();
  min_bound_ = scene_min - scene_size_ * (0.001 / 1.002);
  // 8n+1 slots: the root plus whole groups of eight children.
  capacity_ = 1 + ((capacity + 7) & ~7);
  nodes_ = std::make_unique<std::atomic<std::int32_t>[]>(capacity_);
  nodes_[0].store(0);
  allocation_counter_.store(1);
  depth_.store(0);
}

void DensityOctree::set_iteration(int iteration) {
  const int clamped = std::min(kFillIterations, iteration);
  stop_filling_ = iteration > kFillIterations;
  density_scale_ = 1.0 / clamped;
  split_count_density_ = kSplitFactor * clamped;
  // New children start with the expected share of a split cell: a surface
  // crosses about four of the eight children, so the threshold count is
  // distributed among four. Children are written at split time instead of
  // presetting every unused slot here; the stored values are identical.
  if (!stop_filling_) {
    preset_value_ = static_cast<int>(std::ceil(kSplitFactor / 4.0 * iteration));
  }
}

int DensityOctree::size() const { return std::min(capacity_, allocation_counter_.load()); }

Aabb DensityOctree::bounds() const { return Aabb(min_bound_, min_bound_ + scene_size_); }

std::int32_t DensityOctree::increment_if_positive(int index) {
  std::int32_t old_value = nodes_[index].load();
  std::int32_t new_value;
  do {
    if (old_value < 0) return old_value;  // child reference
    new_value = old_value + 1;
  } while (!nodes_[index].compare_exchange_weak(old_value, new_value));
  return new_value;
}

std::int32_t DensityOctree::split_node_if_necessary(int index, std::int32_t count, int depth) {
  if (count < split_count_density_ || depth >= kMaxDepth) return count;
  if (count == split_count_density_) {
    // Exactly one thread observes the threshold and allocates.
    const std::int32_t child = allocation_counter_.fetch_add(8);
    if (child >= capacity_) {
      allocation_counter_.store(capacity_ + 1);
      return 0;
    }
    for (int i = 0; i < 8; ++i) nodes_[child + i].store(preset_value_);
    nodes_[index].store(-child);
    atomic_max(depth_, depth + 1);
    // The inserted point was counted before the split.
    return 0;
  }
  std::int32_t child = nodes_[index].load();
  while (child > 0) {
    if (allocation_counter_.load() > capacity_) return 0;
    child = nodes_[index].load();
  }
  return child;
}

void DensityOctree::increment(const Vector3& position) {
  if (stop_filling_) return;
  const Vector3 normalized =
      ((position - min_bound_).cwiseProduct(scene_size_inv_)).cwiseMax(0.0).cwiseMin(1.0 - 1e-12);
  std::int32_t count_or_child = increment_if_positive(0);
  count_or_child = split_node_if_necessary(0, count_or_child, 0);
  std::int64_t edge = 1;
  int depth = 0;
  while (count_or_child < 0) {
    edge *= 2;
    ++depth;
    const auto bit = [&](int axis) {
      return static_cast<int>(static_cast<std::int64_t>(normalized[axis] * static_cast<double>(edge)) & 1);
    };
    const int index = bit(0) + 2 * (bit(1) + 2 * bit(2)) - count_or_child;
    count_or_child = increment_if_positive(index);
    count_or_child = split_node_if_necessary(index, count_or_child, depth);
  }
}

DensityQueryResult DensityOctree::get_density(const Vector3& position, const Vector3& normal,
                                              QueryMode mode) const {
  const Vector3 offset_pos = (position - min_bound_).cwiseMax(0.0).cwiseMin(scene_size_);
  const Vector3 normalized = offset_pos.cwiseProduct(scene_size_inv_).cwiseMin(1.0 - 1e-12);
  const std::int64_t grid_res = std::int64_t{1} << depth_.load();
  const Eigen::Matrix<std::int64_t, 3, 1> grid_pos =
      (normalized * static_cast<double>(grid_res)).cast<std::int64_t>();

  std::int32_t count_or_child = nodes_[0].load();
  // Each level consumes the next most significant bit of the grid position.
  std::int64_t level_mask = grid_res;
  while (count_or_child < 0) {
    if (level_mask == 1) return {};  // topology deeper than the published depth
    level_mask >>= 1;
    const int index = ((grid_pos[0] & level_mask) ? 1 : 0) + ((grid_pos[1] & level_mask) ? 2 : 0) +
                      ((grid_pos[2] & level_mask) ? 4 : 0) - count_or_child;
    count_or_child = nodes_[index].load();
  }
  if (count_or_child <= 0) return {};

  const std::int64_t cell_res = grid_res / level_mask;
  const Eigen::Matrix<std::int64_t, 3, 1> cell_pos = grid_pos / level_mask;
  const Vector3 cell_size = scene_size_ / static_cast<double>(cell_res);
  const Vector3 cell_min = cell_pos.cast<double>().cwiseProduct(cell_size);
  const double area = plane_box_area(Aabb(cell_min, cell_min + cell_size), offset_pos, normal);
  // The plane cut can degenerate to (almost) zero area; bound it below by a
  // fraction of the approximate cell area.
  const double cell_diagonal = scene_scale_ / static_cast<double>(cell_res);
  const double min_area = cell_diagonal * cell_diagonal * (mode == QueryMode::robust ? 0.1 : 0.01);
  return {density_scale_ * count_or_child / std::max(min_area, area), cell_diagonal};
}

double robust_median(std::array<double, 5> d) {
  int count = 0;
  for (int i = 0; i < 5; ++i) {
    d[count] = d[i];
    if (d[count] > 0.0) ++count;
  }
  const int m = count / 2;
  for (int i = 0; i <= m; ++i) {
    for (int j = i + 1; j < count; ++j) {
      if (d[j] < d[i]) std::swap(d[i], d[j]);
    }
  }
  return count > 0 ? d[m] : 0.0;
}

double DensityOctree::get_density_robust(const SurfaceFrame& frame) const {
  const Vector3& n = frame.geometric_normal;
  const DensityQueryResult center = get_density(frame.position, n, QueryMode::robust);
  const double offset = 1.1 * (center.cell_diagonal > 0.0 ? center.cell_diagonal : 1e-3 * scene_scale_);
  return robust_median({center.density,
                        get_density(frame.position + frame.tangent_u * offset, n).density,
                        get_density(frame.position - frame.tangent_u * offset, n).density,
                        get_density(frame.position + frame.tangent_v * offset, n).density,
                        get_density(frame.position - frame.tangent_v * offset, n).density});
}

void DensityOctree::clear_counters() {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    if (nodes_[i].load() > 0) nodes_[i].store(0);
  }
}

template <typename Visitor>
void DensityOctree::visit_leaves(Visitor&& visit) const {
  struct Item {
    int index;
    int depth;
    Eigen::Matrix<std::int64_t, 3, 1> cell;
  };
  std::vector<Item> stack{{0, 0, {0, 0, 0}}};
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    const std::int32_t value = nodes_[item.index].load();
    if (value >= 0) {
      visit(item.depth, item.cell, value);
      continue;
    }
    for (int c = 0; c < 8; ++c) {
      const Eigen::Matrix<std::int64_t, 3, 1> offset(c & 1, (c >> 1) & 1, (c >> 2) & 1);
      stack.push_back({-value + c, item.depth + 1, item.cell * 2 + offset});
    }
  }
}

std::int64_t DensityOctree::reachable_counter_sum() const {
  std::int64_t sum = 0;
  visit_leaves([&](int, const auto&, std::int32_t count) { sum += count; });
  return sum;
}

int DensityOctree::max_reachable_counter() const {
  int best = 0;
  visit_leaves([&](int, const auto&, std::int32_t count) { best = std::max(best, count); });
  return best;
}

void DensityOctree::dump(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  visit_leaves([&](int depth, const Eigen::Matrix<std::int64_t, 3, 1>& cell, std::int32_t count) {
    const Vector3 size = scene_size_ / static_cast<double>(std::int64_t{1} << depth);
    const Vector3 lo = min_bound_ + cell.cast<double>().cwiseProduct(size);
    const Vector3 hi = lo + size;
    out << lo.x() << ' ' << lo.y() << ' ' << lo.z() << ' ' << hi.x() << ' ' << hi.y() << ' '
        << hi.z() << ' ' << depth << ' ' << count << '\n';
  });
  out.precision(old_precision);
}

}  // namespace neb
