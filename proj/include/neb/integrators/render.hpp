#pragma once

#include "neb/integrators/neb.hpp"
#include "neb/integrators/path_tracer.hpp"

namespace neb {

/// Dispatches on config.integrator.
inline FrameBuffer render(const Scene& scene, const RenderConfig& config, RenderStats* stats = nullptr) {
  if (config.integrator == IntegratorKind::pt) return render_pt(scene, config, stats);
  return render_neb(scene, config, stats);
}

}  // namespace neb
