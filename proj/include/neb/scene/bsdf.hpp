#pragma once

#include "neb/math/frame.hpp"
#include "neb/math/sampling.hpp"
#include "neb/math/types.hpp"

#include <optional>
#include <variant>

namespace neb {

// Direction convention: wi points from the surface toward the vertex the
// path came from, wo toward the next vertex. Both point away from the
// surface. In radiance mode the path starts at the camera, in importance
// mode at a light.

enum class TransportMode { radiance, importance };

struct Lambert {
  Spectrum albedo = Spectrum::Constant(0.8);
};

struct Mirror {
  Spectrum reflectance = Spectrum::Ones();
};

/// Smooth glass with Fresnel-weighted reflection and refraction.
struct Dielectric {
  double ior = 1.5;
};

/// Glass with a GGX microfacet surface.
struct RoughDielectric {
  double ior = 1.5;
  double alpha = 0.1;
};

/// Energy-normalized Phong lobe around the mirror direction.
struct GlossyPhong {
  Spectrum albedo = Spectrum::Constant(0.8);
  double exponent = 20.0;
};

using BsdfModel = std::variant<Lambert, Mirror, Dielectric, RoughDielectric, GlossyPhong>;

struct Bsdf {
  BsdfModel model = Lambert{};

  bool is_delta() const {
    return std::holds_alternative<Mirror>(model) || std::holds_alternative<Dielectric>(model);
  }
};

struct BsdfEval {
  Spectrum f = Spectrum::Zero();  // 1/sr
  double pdf_fwd = 0.0;           // density of wo given wi (1/sr)
  double pdf_rev = 0.0;           // density of wi given wo (1/sr)
};

struct BsdfSample {
  Vector3 wo = Vector3::Zero();
  // For Dirac lobes f is the sampled throughput divided by |cos(wo)| and
  // both densities are 1, so f * |cos| / pdf is the path weight in all cases.
  Spectrum f = Spectrum::Zero();
  double pdf_fwd = 0.0;
  double pdf_rev = 0.0;
  bool is_delta = false;

  Spectrum weight(const SurfaceFrame& frame) const {
    return f * (std::abs(frame.cos_shading(wo)) / pdf_fwd);
  }
};

BsdfEval bsdf_eval(const Bsdf& bsdf, const SurfaceFrame& frame, const Vector3& wi, const Vector3& wo,
                   TransportMode mode = TransportMode::radiance);

std::optional<BsdfSample> bsdf_sample(const Bsdf& bsdf, const SurfaceFrame& frame, const Vector3& wi,
                                      Sampler& sampler, TransportMode mode = TransportMode::radiance);

/// Unpolarized Fresnel reflectance for a dielectric interface with relative
/// index eta (inside over outside). cos_i is measured against the outward
/// normal; cos_t receives the signed transmitted cosine, 0 on total internal
/// reflection.
double fresnel_dielectric(double cos_i, double eta, double& cos_t);

namespace ggx {
double distribution(const Vector3& m, double alpha);
double smith_g1(const Vector3& v, const Vector3& m, double alpha);
/// Microfacet normal with density D(m) cos(theta_m), local frame.
Vector3 sample_normal(const Vector2& u, double alpha);
}  // namespace ggx

}  // namespace neb
