#pragma once

// Sampling densities of a complete light path under the four samplers that
// can generate it, and their balance-heuristic weights.
//
// A path of length L has vertices 0 (camera) .. L (light). Samplers:
//   random hit      all segments sampled from the camera side
//   NEE             camera-side walk to vertex L-1, connection to the light
//   NEB photon k    NEE at vertex L-1, backward walk from L-1 to k, merge
//                   with the camera-side walk at k (1 <= k <= L-2)
//   light photon k  emission from the light, backward walk to k, merge at k
//                   (1 <= k <= L-1)
//
// Dirac factors are carried symbolically: a specular vertex stores its
// residual density and only samplers with the highest Dirac order compete.

#include <array>
#include <cstddef>

namespace neb {

inline constexpr int kMaxPathLength = 16;

struct PdfChain {
  int length = 0;
  // forward[i] = p_{i->i+1}, area density of reaching vertex i+1 from i (1/m^2)
  std::array<double, kMaxPathLength> forward{};
  // reverse[i] = p_{i+1->i}, area density of reaching vertex i from i+1
  std::array<double, kMaxPathLength> reverse{};
  // specular[j]: vertex j scatters through a Dirac lobe in both directions
  std::array<bool, kMaxPathLength + 1> specular{};
  // Area density of the light point, residual when light_delta is set.
  double light_pdf = 0.0;
  bool light_delta = false;
};

/// A density with `deltas` symbolic Dirac factors.
struct PathDensity {
  double value = 0.0;
  int deltas = 0;
};

struct SamplerCounts {
  double n_nee = 1.0;           // NEE samples per stored vertex
  double n_photon = 0.0;        // NEB photon paths, equals the stored vertex count
  double n_light_photon = 0.0;  // light photon paths, 0 when disabled
};

struct MergeContext {
  double radius = 0.0;       // merge radius r (m)
  double rho_emitter = 0.0;  // stored vertex density at vertex L-1 (1/m^2)
  double vertex_count = 0.0; // n_T, number of stored vertices
};

struct MisWeights {
  double random_hit = 0.0;
  double nee = 0.0;
  std::array<double, kMaxPathLength> photon{};        // indexed by merge vertex k
  std::array<double, kMaxPathLength> light_photon{};  // indexed by merge vertex k

  double sum(int length) const;
};

PathDensity pdf_random_hit(const PdfChain& chain);
PathDensity pdf_nee(const PdfChain& chain);
/// Throws std::out_of_range unless 1 <= k <= length - 2.
PathDensity pdf_neb_photon(const PdfChain& chain, const MergeContext& merge, int k);
/// Throws std::out_of_range unless 1 <= k <= length - 1.
PathDensity pdf_light_photon(const PdfChain& chain, double radius, int k);

/// Balance heuristic weights from direct products of the chain densities.
MisWeights mis_weights(const PdfChain& chain, const MergeContext& merge, const SamplerCounts& counts);

/// Same weights from running prefix/suffix products in a single sweep.
MisWeights mis_weights_incremental(const PdfChain& chain, const MergeContext& merge,
                                   const SamplerCounts& counts);

}  // namespace neb
