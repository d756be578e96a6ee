#include "neb/scene/bsdf.hpp"

#include <cmath>

namespace neb {

double fresnel_dielectric(double cos_i, double eta, double& cos_t) {
  if (eta == 1.0) {
    cos_t = -cos_i;
    return 0.0;
  }
  const double scale = cos_i > 0.0 ? 1.0 / eta : eta;
  const double cos_t_sqr = 1.0 - (1.0 - cos_i * cos_i) * scale * scale;
  if (cos_t_sqr <= 0.0) {
    cos_t = 0.0;
    return 1.0;
  }
  const double ci = std::abs(cos_i);
  const double ct = std::sqrt(cos_t_sqr);
  const double rs = (ci - eta * ct) / (ci + eta * ct);
  const double rp = (eta * ci - ct) / (eta * ci + ct);
  cos_t = cos_i > 0.0 ? -ct : ct;
  return 0.5 * (rs * rs + rp * rp);
}

namespace ggx {

double distribution(const Vector3& m, double alpha) {
  if (m.z() <= 0.0) return 0.0;
  const double a2 = alpha * alpha;
  const double t = m.z() * m.z() * (a2 - 1.0) + 1.0;
  return a2 / (kPi * t * t);
}

double smith_g1(const Vector3& v, const Vector3& m, double alpha) {
  if (v.dot(m) * v.z() <= 0.0) return 0.0;
  const double z2 = v.z() * v.z();
  const double tan2 = std::max(0.0, 1.0 - z2) / z2;
  return 2.0 / (1.0 + std::sqrt(1.0 + alpha * alpha * tan2));
}

Vector3 sample_normal(const Vector2& u, double alpha) {
  const double tan2 = alpha * alpha * u.x() / std::max(1e-300, 1.0 - u.x());
  const double cos_theta = 1.0 / std::sqrt(1.0 + tan2);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * kPi * u.y();
  return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
}

}  // namespace ggx

namespace {

Vector3 reflect_local(const Vector3& w) { return {-w.x(), -w.y(), w.z()}; }

// --- Lambert ---------------------------------------------------------------

BsdfEval eval(const Lambert& b, const Vector3& wi, const Vector3& wo, TransportMode) {
  if (wi.z() * wo.z() <= 0.0) return {};
  return {b.albedo * kInvPi, std::abs(wo.z()) * kInvPi, std::abs(wi.z()) * kInvPi};
}

std::optional<BsdfSample> sample(const Lambert& b, const Vector3& wi, Sampler& sampler, TransportMode mode) {
  if (wi.z() == 0.0) return std::nullopt;
  Vector3 wo = square_to_cosine_hemisphere(sampler.next_2d());
  if (wi.z() < 0.0) wo.z() = -wo.z();
  if (wo.z() == 0.0) return std::nullopt;
  const BsdfEval e = eval(b, wi, wo, mode);
  return BsdfSample{wo, e.f, e.pdf_fwd, e.pdf_rev, false};
}

// --- Mirror ----------------------------------------------------------------

BsdfEval eval(const Mirror&, const Vector3&, const Vector3&, TransportMode) { return {}; }

std::optional<BsdfSample> sample(const Mirror& b, const Vector3& wi, Sampler&, TransportMode) {
  if (wi.z() == 0.0) return std::nullopt;
  const Vector3 wo = reflect_local(wi);
  return BsdfSample{wo, b.reflectance / std::abs(wo.z()), 1.0, 1.0, true};
}

// --- Dielectric --------------------------------------------------------------

BsdfEval eval(const Dielectric&, const Vector3&, const Vector3&, TransportMode) { return {}; }

std::optional<BsdfSample> sample(const Dielectric& b, const Vector3& wi, Sampler& sampler,
                                 TransportMode mode) {
  if (wi.z() == 0.0) return std::nullopt;
  double cos_t = 0.0;
  const double fresnel = fresnel_dielectric(wi.z(), b.ior, cos_t);
  if (sampler.next_1d() < fresnel) {
    const Vector3 wo = reflect_local(wi);
    return BsdfSample{wo, Spectrum::Constant(1.0 / std::abs(wo.z())), 1.0, 1.0, true};
  }
  const double scale = cos_t < 0.0 ? 1.0 / b.ior : b.ior;
  const Vector3 wo(-scale * wi.x(), -scale * wi.y(), cos_t);
  if (wo.z() == 0.0) return std::nullopt;
  // Radiance is compressed into the smaller solid angle on the dense side.
  const double factor = mode == TransportMode::radiance ? scale * scale : 1.0;
  return BsdfSample{wo, Spectrum::Constant(factor / std::abs(wo.z())), 1.0, 1.0, true};
}

// --- RoughDielectric -------------------------------------------------------

double rough_pdf(const RoughDielectric& b, const Vector3& wi, const Vector3& wo) {
  const double ci = wi.z();
  const double co = wo.z();
  if (ci == 0.0 || co == 0.0) return 0.0;
  const bool reflect = ci * co > 0.0;
  Vector3 h;
  double dwh_dwo;
  if (reflect) {
    h = (wo + wi).normalized();
    dwh_dwo = 1.0 / (4.0 * wo.dot(h));
  } else {
    const double eta = ci > 0.0 ? b.ior : 1.0 / b.ior;
    h = (wi + wo * eta).normalized();
    const double denom = wi.dot(h) + eta * wo.dot(h);
    dwh_dwo = eta * eta * wo.dot(h) / (denom * denom);
  }
  if (h.z() < 0.0) h = -h;
  // Back-facing microfacets carry no energy and are never sampled.
  if (wi.dot(h) * ci <= 0.0 || wo.dot(h) * co <= 0.0) return 0.0;
  double prob = ggx::distribution(h, b.alpha) * h.z();
  double cos_t = 0.0;
  const double fresnel = fresnel_dielectric(wi.dot(h), b.ior, cos_t);
  prob *= reflect ? fresnel : 1.0 - fresnel;
  return std::abs(prob * dwh_dwo);
}

BsdfEval eval(const RoughDielectric& b, const Vector3& wi, const Vector3& wo, TransportMode mode) {
  const double ci = wi.z();
  const double co = wo.z();
  if (ci == 0.0 || co == 0.0) return {};
  const bool reflect = ci * co > 0.0;
  const double eta = ci > 0.0 ? b.ior : 1.0 / b.ior;
  Vector3 h = reflect ? Vector3((wo + wi).normalized()) : Vector3((wi + wo * eta).normalized());
  if (h.z() < 0.0) h = -h;
  const double d = ggx::distribution(h, b.alpha);
  if (d == 0.0) return {};
  double cos_t = 0.0;
  const double fresnel = fresnel_dielectric(wi.dot(h), b.ior, cos_t);
  const double g = ggx::smith_g1(wi, h, b.alpha) * ggx::smith_g1(wo, h, b.alpha);
  double value;
  if (reflect) {
    value = fresnel * d * g / (4.0 * std::abs(ci) * std::abs(co));
  } else {
    const double denom = wi.dot(h) + eta * wo.dot(h);
    value = std::abs((1.0 - fresnel) * d * g * eta * eta * wi.dot(h) * wo.dot(h) /
                     (ci * co * denom * denom));
    if (mode == TransportMode::radiance) value /= eta * eta;
  }
  return {Spectrum::Constant(value), rough_pdf(b, wi, wo), rough_pdf(b, wo, wi)};
}

std::optional<BsdfSample> sample(const RoughDielectric& b, const Vector3& wi, Sampler& sampler,
                                 TransportMode mode) {
  if (wi.z() == 0.0) return std::nullopt;
  const Vector3 m = ggx::sample_normal(sampler.next_2d(), b.alpha);
  if (wi.dot(m) * wi.z() <= 0.0) return std::nullopt;
  double cos_t = 0.0;
  const double fresnel = fresnel_dielectric(wi.dot(m), b.ior, cos_t);
  Vector3 wo;
  if (sampler.next_1d() < fresnel) {
    wo = 2.0 * wi.dot(m) * m - wi;
    if (wi.z() * wo.z() <= 0.0) return std::nullopt;
  } else {
    if (cos_t == 0.0) return std::nullopt;
    const double scale = cos_t < 0.0 ? 1.0 / b.ior : b.ior;
    wo = m * (wi.dot(m) * scale + cos_t) - wi * scale;
    if (wi.z() * wo.z() >= 0.0) return std::nullopt;
  }
  const BsdfEval e = eval(b, wi, wo, mode);
  if (e.pdf_fwd <= 0.0 || is_black(e.f)) return std::nullopt;
  return BsdfSample{wo, e.f, e.pdf_fwd, e.pdf_rev, false};
}

// --- GlossyPhong -----------------------------------------------------------

BsdfEval eval(const GlossyPhong& b, const Vector3& wi, const Vector3& wo, TransportMode) {
  if (wi.z() * wo.z() <= 0.0) return {};
  const double cos_alpha = reflect_local(wi).dot(wo);
  if (cos_alpha <= 0.0) return {};
  const double lobe = std::pow(cos_alpha, b.exponent);
  const double pdf = (b.exponent + 1.0) / (2.0 * kPi) * lobe;
  return {b.albedo * ((b.exponent + 2.0) / (2.0 * kPi) * lobe), pdf, pdf};
}

std::optional<BsdfSample> sample(const GlossyPhong& b, const Vector3& wi, Sampler& sampler,
                                 TransportMode mode) {
  if (wi.z() == 0.0) return std::nullopt;
  const Vector3 r = reflect_local(wi);
  Vector3 u, v;
  coordinate_system(r, u, v);
  const Vector3 l = square_to_power_cosine(sampler.next_2d(), b.exponent);
  const Vector3 wo = (l.x() * u + l.y() * v + l.z() * r).normalized();
  const BsdfEval e = eval(b, wi, wo, mode);
  if (e.pdf_fwd <= 0.0) return std::nullopt;
  return BsdfSample{wo, e.f, e.pdf_fwd, e.pdf_rev, false};
}

}  // namespace

BsdfEval bsdf_eval(const Bsdf& bsdf, const SurfaceFrame& frame, const Vector3& wi, const Vector3& wo,
                   TransportMode mode) {
  const Vector3 lwi = frame.to_local(wi);
  const Vector3 lwo = frame.to_local(wo);
  return std::visit([&](const auto& b) { return eval(b, lwi, lwo, mode); }, bsdf.model);
}

std::optional<BsdfSample> bsdf_sample(const Bsdf& bsdf, const SurfaceFrame& frame, const Vector3& wi,
                                      Sampler& sampler, TransportMode mode) {
  const Vector3 lwi = frame.to_local(wi);
  std::optional<BsdfSample> s =
      std::visit([&](const auto& b) { return sample(b, lwi, sampler, mode); }, bsdf.model);
  if (s) s->wo = frame.to_world(s->wo).normalized();
  return s;
}

}  // namespace neb
