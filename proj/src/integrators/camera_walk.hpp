#pragma once

// Camera-side random walk bookkeeping shared by the path tracer and the
// first NEB pass.

#include "neb/mis/path_pdfs.hpp"
#include "neb/scene/scene.hpp"

namespace neb::detail {

struct CameraWalk {
  PdfChain chain;  // forward[0..depth-1], reverse[0..depth-2], specular[1..depth]
  int depth = 0;   // index of the current vertex
  Spectrum throughput = Spectrum::Ones();
  Ray ray;
  // Densities of the bounce that produced `ray` (solid angle), and whether
  // it went through a Dirac lobe.
  double bounce_pdf_fwd = 1.0;
  double bounce_pdf_rev = 0.0;
  // Segment into the current vertex: |cos| at its start and squared length.
  double segment_cos_start = 1.0;
  double segment_dist2 = 1.0;
  Vector3 last_geometric_normal = Vector3::Zero();
  bool at_camera = true;

  /// Updates the densities for the vertex just hit by `ray`.
  void advance(const Intersection& its) {
    const int k = depth + 1;
    const double cos_here = std::abs(its.frame.geometric_normal.dot(its.wi));
    const double dist2 = its.distance * its.distance;
    chain.forward[k - 1] = at_camera ? 1.0 : bounce_pdf_fwd * cos_here / dist2;
    if (k >= 2) chain.reverse[k - 2] = bounce_pdf_rev * segment_cos_start / segment_dist2;
    segment_cos_start = at_camera ? 1.0 : std::abs(last_geometric_normal.dot(ray.direction));
    segment_dist2 = dist2;
    last_geometric_normal = its.frame.geometric_normal;
    depth = k;
    at_camera = false;
  }
};

/// Russian roulette on the path throughput. Returns false to terminate.
inline bool russian_roulette(Spectrum& throughput, int depth, double u) {
  if (depth < 4) return true;
  const double survive = std::min(1.0, luminance(throughput));
  if (!(survive > 0.0) || u >= survive) return false;
  throughput /= survive;
  return true;
}

}  // namespace neb::detail
