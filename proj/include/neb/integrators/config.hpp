#pragma once

#include "neb/octree/density_octree.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace neb {

enum class IntegratorKind { pt, neb, neb_lp };

IntegratorKind parse_integrator(const std::string& name);  // throws std::invalid_argument
std::string to_string(IntegratorKind kind);

struct RenderConfig {
  IntegratorKind integrator = IntegratorKind::neb;
  int width = 0;   // 0: camera resolution
  int height = 0;
  int iterations = 0;          // used when time_budget is 0
  double time_budget = 0.0;    // seconds
  std::uint64_t seed = 1;
  int threads = 1;
  int max_depth = 10;          // maximum number of path segments
  double radius_scale = 2e-3;  // merge radius relative to the scene diagonal
  int octree_capacity = DensityOctree::kDefaultCapacity;
  long long n_lp = 0;          // light photons per iteration, 0: one per pixel
  bool occluded_records_count = true;
  long long vertex_capacity = 0;  // 0: pixels * max_depth

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Thrown when the vertex store of an iteration would overflow.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& message, long long required)
      : std::runtime_error(message), required_capacity(required) {}
  long long required_capacity;
};

struct RenderStats {
  int iterations = 0;
  double seconds = 0.0;
  long long records = 0;          // stored NEE vertices, last iteration
  long long emission_events = 0;  // last iteration
  long long photon_vertices = 0;  // last iteration
  long long merges = 0;           // last iteration
};

}  // namespace neb
