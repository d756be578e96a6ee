#pragma once

#include "neb/math/frame.hpp"
#include "neb/math/types.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>

namespace neb {

struct DensityQueryResult {
  double density = 0.0;        // vertices per m^2 and iteration
  double cell_diagonal = 0.0;  // 0 if the queried cell is empty
};

/// Sparse octree of atomic counters that estimates the surface density of
/// inserted points.
///
/// Every slot of the flat node array is either a counter (>= 0) or the
/// negated index of the first of eight contiguous children (< 0).
/// Insertion is lock-free: the thread whose increment reaches the split
/// threshold allocates the children and publishes the child index, others
/// that hit the same slot spin until the index is visible.
///
/// Counters integrate over iterations. The split threshold grows with the
/// iteration count and queries are normalized by it, so densities are always
/// "vertices per iteration and unit area".
class DensityOctree {
 public:
  static constexpr int kSplitFactor = 4;
  static constexpr int kFillIterations = 1000;
  static constexpr int kDefaultCapacity = 1 << 22;
  static constexpr int kMaxDepth = 30;

  enum class QueryMode {
    plain,   // minimum area 1/100 of the squared cell diagonal
    robust,  // minimum area 1/10, used by the median query
  };

  /// Throws std::invalid_argument for an empty box or capacity below 9.
  DensityOctree(const Vector3& scene_min, const Vector3& scene_max,
                int capacity = kDefaultCapacity);

  /// Must be called with exclusive access before the increments of each
  /// iteration (1-based).
  void set_iteration(int iteration);

  void increment(const Vector3& position);

  DensityQueryResult get_density(const Vector3& position, const Vector3& normal,
                                 QueryMode mode = QueryMode::plain) const;

  /// Median of the positive densities at the frame position and four
  /// neighbors offset along the tangents, using the geometric normal.
  double get_density_robust(const SurfaceFrame& frame) const;

  /// Zero all counters, keeping the allocated topology.
  void clear_counters();

  int capacity() const { return capacity_; }
  int size() const;
  int depth() const { return depth_.load(); }
  int split_count() const { return (size() - 1) / 8; }
  bool stop_filling() const { return stop_filling_; }
  double density_scale() const { return density_scale_; }
  int split_count_density() const { return split_count_density_; }
  int preset_value() const { return preset_value_; }
  double scene_scale() const { return scene_scale_; }
  Aabb bounds() const;

  /// Sum over all counter slots reachable from the root.
  std::int64_t reachable_counter_sum() const;

  /// Largest counter reachable from the root.
  int max_reachable_counter() const;

  /// One line per reachable leaf: "minx miny minz maxx maxy maxz depth count".
  void dump(std::ostream& out) const;

  /// Raw slot value, for inspection in tests.
  std::int32_t slot(int index) const { return nodes_[index].load(); }

 private:
  std::int32_t increment_if_positive(int index);
  std::int32_t split_node_if_necessary(int index, std::int32_t count, int depth);

  template <typename Visitor>
  void visit_leaves(Visitor&& visit) const;

  std::unique_ptr<std::atomic<std::int32_t>[]> nodes_;
  std::atomic<std::int32_t> allocation_counter_{1};
  std::atomic<int> depth_{0};
  Vector3 min_bound_;
  Vector3 scene_size_;
  Vector3 scene_size_inv_;
  double scene_scale_ = 0.0;
  double density_scale_ = 1.0;
  int capacity_ = 0;
  int split_count_density_ = kSplitFactor;
  int preset_value_ = 1;
  bool stop_filling_ = false;
};

/// Median selection used by the robust query: compacts the positive entries
/// to the front in query order, then selection-sorts up to the middle and
/// returns the element at count/2 (the greater one for even counts).
double robust_median(std::array<double, 5> densities);

}  // namespace neb
