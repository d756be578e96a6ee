#pragma once

#include "neb/integrators/config.hpp"
#include "neb/integrators/framebuffer.hpp"
#include "neb/math/sampling.hpp"
#include "neb/scene/scene.hpp"

namespace neb {

/// Unidirectional path tracer with next event estimation at every
/// non-Dirac vertex, both techniques combined by the balance heuristic.
class PathTracer {
 public:
  PathTracer(const Scene& scene, const RenderConfig& config);

  void run_iteration();

  /// Radiance estimate of one camera sample for pixel (x, y).
  Spectrum trace_pixel(int x, int y, Sampler& sampler) const;

  const FrameBuffer& framebuffer() const { return framebuffer_; }
  const PinholeCamera& camera() const { return camera_; }

 private:
  const Scene& scene_;
  RenderConfig config_;
  PinholeCamera camera_;
  FrameBuffer framebuffer_;
};

FrameBuffer render_pt(const Scene& scene, const RenderConfig& config, RenderStats* stats = nullptr);

/// Camera with the configured resolution override applied.
PinholeCamera configured_camera(const Scene& scene, const RenderConfig& config);

}  // namespace neb
