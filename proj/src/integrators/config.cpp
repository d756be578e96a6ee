#include "neb/integrators/config.hpp"

namespace neb {

IntegratorKind parse_integrator(const std::string& name) {
  if (name == "pt") return IntegratorKind::pt;
  if (name == "neb") return IntegratorKind::neb;
  if (name == "neb_lp") return IntegratorKind::neb_lp;
  throw std::invalid_argument("unknown integrator '" + name + "' (expected pt, neb or neb_lp)");
}

std::string to_string(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::pt: return "pt";
    case IntegratorKind::neb: return "neb";
    case IntegratorKind::neb_lp: return "neb_lp";
  }
  return "?";
}

void RenderConfig::validate() const {
  const auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (width < 0 || height < 0) fail("width and height must be positive");
  if (iterations < 0) fail("iterations must be positive");
  if (time_budget < 0.0) fail("time budget must be positive");
  if (threads < 1) fail("threads must be positive");
  if (max_depth < 1 || max_depth > 15) fail("max depth must be in [1, 15]");
  if (!(radius_scale > 0.0)) fail("radius scale must be positive");
  if (octree_capacity < 9) fail("octree capacity must be at least 9");
  if (n_lp < 0) fail("light photon count must be nonnegative");
  if (vertex_capacity < 0) fail("vertex capacity must be nonnegative");
}

}  // namespace neb
