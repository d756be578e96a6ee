#include "neb/scene/bsdf.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace neb {
namespace {

const SurfaceFrame kFrame = SurfaceFrame::from_normal(Vector3::Zero(), Vector3::UnitZ());

Vector3 direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Upper critical value of chi^2 with `df` degrees of freedom at p = 1e-3
// from the Wilson-Hilferty approximation.
double chi2_critical(int df) {
  const double z = 3.09;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

// Histogram of sampled directions over (cos theta, phi) against the pdf
// integrated numerically over every bin. Bins with tiny expectation are
// pooled.
double chi2_statistic(const Bsdf& bsdf, const Vector3& wi, TransportMode mode, int samples, int& df) {
  const int nt = 20, np = 40, sub = 8;
  std::vector<double> observed(nt * np, 0.0), expected(nt * np, 0.0);
  Sampler sampler(12345);
  for (int i = 0; i < samples; ++i) {
    const auto s = bsdf_sample(bsdf, kFrame, wi, sampler, mode);
    if (!s) continue;
    const double c = std::clamp(s->wo.z(), -1.0, 1.0 - 1e-15);
    double phi = std::atan2(s->wo.y(), s->wo.x());
    if (phi < 0) phi += 2 * kPi;
    const int bt = std::min(nt - 1, static_cast<int>((c + 1.0) / 2.0 * nt));
    const int bp = std::min(np - 1, static_cast<int>(phi / (2 * kPi) * np));
    observed[bt * np + bp] += 1;
  }
  for (int bt = 0; bt < nt; ++bt) {
    for (int bp = 0; bp < np; ++bp) {
      double integral = 0.0;
      for (int a = 0; a < sub; ++a) {
        for (int b = 0; b < sub; ++b) {
          const double c = -1.0 + (bt + (a + 0.5) / sub) * 2.0 / nt;
          const double phi = (bp + (b + 0.5) / sub) * 2 * kPi / np;
          const double s = std::sqrt(std::max(0.0, 1 - c * c));
          const Vector3 wo(s * std::cos(phi), s * std::sin(phi), c);
          integral += bsdf_eval(bsdf, kFrame, wi, wo, mode).pdf_fwd;
        }
      }
      expected[bt * np + bp] = integral * (2.0 / nt) * (2 * kPi / np) / (sub * sub) * samples;
    }
  }
  double chi2 = 0.0, pool_o = 0.0, pool_e = 0.0;
  df = -1;
  for (int i = 0; i < nt * np; ++i) {
    if (expected[i] < 5.0) {
      pool_o += observed[i];
      pool_e += expected[i];
      continue;
    }
    chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++df;
  }
  if (pool_e >= 5.0) {
    chi2 += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
    ++df;
  }
  return chi2;
}

TEST(Lambert, EvalValues) {
  const Bsdf b{Lambert{Spectrum::Constant(0.8)}};
  const Vector3 wi = direction(0.3, 1.0), wo = direction(1.1, 4.0);
  const BsdfEval e = bsdf_eval(b, kFrame, wi, wo);
  EXPECT_NEAR(e.f[0], 0.8 / kPi, 1e-12);
  EXPECT_NEAR(e.pdf_fwd, std::cos(1.1) / kPi, 1e-12);
  EXPECT_NEAR(e.pdf_rev, std::cos(0.3) / kPi, 1e-12);
  // Opposite sides: no reflection.
  EXPECT_TRUE(is_black(bsdf_eval(b, kFrame, wi, Vector3(-wo)).f));
}

TEST(Lambert, ChiSquareCosineDistribution) {
  const Bsdf b{Lambert{Spectrum::Constant(0.8)}};
  int df = 0;
  const double chi2 = chi2_statistic(b, direction(0.7, 0.2), TransportMode::radiance, 1'000'000, df);
  EXPECT_LT(chi2, chi2_critical(df)) << "df " << df;
}

TEST(GlossyPhong, ChiSquare) {
  const Bsdf b{GlossyPhong{Spectrum::Constant(0.9), 10.0}};
  int df = 0;
  const double chi2 = chi2_statistic(b, direction(0.5, 2.0), TransportMode::radiance, 1'000'000, df);
  EXPECT_LT(chi2, chi2_critical(df)) << "df " << df;
}

TEST(RoughDielectric, ChiSquareBothSides) {
  const Bsdf b{RoughDielectric{1.5, 0.3}};
  for (const Vector3& wi : {direction(0.6, 0.4), direction(kPi - 0.5, 1.3)}) {
    int df = 0;
    const double chi2 = chi2_statistic(b, wi, TransportMode::radiance, 1'000'000, df);
    EXPECT_LT(chi2, chi2_critical(df)) << "df " << df;
  }
}

TEST(GlossyPhong, PdfIntegratesToOneAtNormalIncidence) {
  const Bsdf b{GlossyPhong{Spectrum::Constant(0.5), 30.0}};
  const int n = 2000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double theta = (i + 0.5) / n * (kPi / 2);
    sum += bsdf_eval(b, kFrame, Vector3::UnitZ(), direction(theta, 0.0)).pdf_fwd * std::sin(theta) *
           (kPi / 2) / n * 2 * kPi;
  }
  EXPECT_GE(sum, 0.999);
  EXPECT_LE(sum, 1.001);
}

TEST(Bsdf, SampleAndEvalDensitiesAgree) {
  const std::vector<Bsdf> models = {Bsdf{Lambert{}}, Bsdf{GlossyPhong{Spectrum::Constant(0.7), 25.0}},
                                    Bsdf{RoughDielectric{1.5, 0.2}}, Bsdf{RoughDielectric{1.33, 0.6}}};
  std::mt19937_64 rng(3);
  Sampler sampler(4);
  for (const Bsdf& b : models) {
    for (int mode = 0; mode < 2; ++mode) {
      const auto m = static_cast<TransportMode>(mode);
      for (int i = 0; i < 5000; ++i) {
        const Vector3 wi = testing::random_unit_vector(rng);
        const auto s = bsdf_sample(b, kFrame, wi, sampler, m);
        if (!s) continue;
        const BsdfEval e = bsdf_eval(b, kFrame, wi, s->wo, m);
        EXPECT_NEAR(e.pdf_fwd, s->pdf_fwd, 1e-5 * s->pdf_fwd);
        EXPECT_NEAR(e.pdf_rev, s->pdf_rev, 1e-5 * s->pdf_rev);
        EXPECT_NEAR(e.f[0], s->f[0], 1e-5 * s->f[0]);
        EXPECT_FALSE(s->is_delta);
      }
    }
  }
}

TEST(Bsdf, ReverseDensityIsForwardDensityOfSwappedPair) {
  const std::vector<Bsdf> models = {Bsdf{GlossyPhong{Spectrum::Constant(0.7), 25.0}},
                                    Bsdf{RoughDielectric{1.5, 0.3}}};
  std::mt19937_64 rng(8);
  for (const Bsdf& b : models) {
    for (int i = 0; i < 5000; ++i) {
      const Vector3 wi = testing::random_unit_vector(rng), wo = testing::random_unit_vector(rng);
      const BsdfEval a = bsdf_eval(b, kFrame, wi, wo);
      const BsdfEval r = bsdf_eval(b, kFrame, wo, wi);
      EXPECT_NEAR(a.pdf_rev, r.pdf_fwd, 1e-9 * (1 + r.pdf_fwd));
    }
  }
}

TEST(Bsdf, Reciprocity) {
  const std::vector<Bsdf> models = {Bsdf{Lambert{Spectrum(0.2, 0.5, 0.9)}},
                                    Bsdf{GlossyPhong{Spectrum::Constant(0.7), 40.0}}};
  std::mt19937_64 rng(5);
  for (const Bsdf& b : models) {
    for (int i = 0; i < 10000; ++i) {
      const Vector3 wi = testing::random_unit_vector(rng), wo = testing::random_unit_vector(rng);
      const Spectrum f1 = bsdf_eval(b, kFrame, wi, wo).f, f2 = bsdf_eval(b, kFrame, wo, wi).f;
      EXPECT_LE((f1 - f2).abs().maxCoeff(), 1e-6);
    }
  }
}

TEST(RoughDielectric, AdjointOfRadianceIsImportanceWithSwappedDirections) {
  const Bsdf b{RoughDielectric{1.5, 0.25}};
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10000; ++i) {
    const Vector3 wi = testing::random_unit_vector(rng), wo = testing::random_unit_vector(rng);
    const double rad = bsdf_eval(b, kFrame, wi, wo, TransportMode::radiance).f[0];
    const double imp = bsdf_eval(b, kFrame, wo, wi, TransportMode::importance).f[0];
    EXPECT_NEAR(rad, imp, 1e-9 * (1 + rad));
  }
}

TEST(Mirror, SamplesExactReflection) {
  const Bsdf b{Mirror{Spectrum(0.9, 0.8, 0.7)}};
  Sampler sampler(1);
  const Vector3 wi = direction(0.8, 2.5);
  const auto s = bsdf_sample(b, kFrame, wi, sampler);
  ASSERT_TRUE(s);
  EXPECT_LT((s->wo - reflect(wi, Vector3::UnitZ())).norm(), 1e-12);
  EXPECT_TRUE(s->is_delta);
  EXPECT_EQ(s->pdf_fwd, 1.0);
  EXPECT_LT((s->weight(kFrame) - Spectrum(0.9, 0.8, 0.7)).abs().maxCoeff(), 1e-12);
  const BsdfEval e = bsdf_eval(b, kFrame, wi, s->wo);
  EXPECT_TRUE(is_black(e.f));
  EXPECT_EQ(e.pdf_fwd, 0.0);
}

TEST(Dielectric, FresnelAtNormalIncidence) {
  double cos_t;
  EXPECT_NEAR(fresnel_dielectric(1.0, 1.5, cos_t), 0.04, 1e-12);
  EXPECT_NEAR(cos_t, -1.0, 1e-12);
  EXPECT_NEAR(fresnel_dielectric(-1.0, 1.5, cos_t), 0.04, 1e-12);
  // Total internal reflection beyond the critical angle from inside.
  EXPECT_EQ(fresnel_dielectric(-0.5, 1.5, cos_t), 1.0);
  EXPECT_EQ(cos_t, 0.0);
}

TEST(Dielectric, ReflectionProbabilityAtNormalIncidence) {
  const Bsdf b{Dielectric{1.5}};
  Sampler sampler(2);
  const int n = 200000;
  int reflected = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = bsdf_sample(b, kFrame, Vector3::UnitZ(), sampler);
    ASSERT_TRUE(s);
    EXPECT_TRUE(s->is_delta);
    reflected += s->wo.z() > 0.0;
  }
  // Binomial standard deviation is about 4.4e-4.
  EXPECT_NEAR(static_cast<double>(reflected) / n, 0.04, 0.003);
}

TEST(Dielectric, SnellAndTotalInternalReflection) {
  const Bsdf b{Dielectric{1.5}};
  Sampler sampler(3);
  const double theta = 0.6;
  const Vector3 wi = direction(theta, 0.0);
  for (int i = 0; i < 100; ++i) {
    const auto s = bsdf_sample(b, kFrame, wi, sampler);
    ASSERT_TRUE(s);
    if (s->wo.z() < 0.0) {
      const double sin_t = std::sqrt(1 - s->wo.z() * s->wo.z());
      EXPECT_NEAR(sin_t * 1.5, std::sin(theta), 1e-12);
      EXPECT_NEAR(s->wo.norm(), 1.0, 1e-12);
    }
  }
  // From inside at 60 degrees the critical angle (41.8) is exceeded.
  const Vector3 inside = direction(kPi - 1.05, 0.3);
  for (int i = 0; i < 100; ++i) {
    const auto s = bsdf_sample(b, kFrame, inside, sampler);
    ASSERT_TRUE(s);
    EXPECT_LT(s->wo.z(), 0.0);
    EXPECT_LT((s->wo - reflect(inside, Vector3::UnitZ())).norm(), 1e-12);
  }
}

// Mean sampled weight estimates the directional-hemispherical reflectance.
double albedo_estimate(const Bsdf& b, const Vector3& wi, TransportMode mode, int n) {
  Sampler sampler(77);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (const auto s = bsdf_sample(b, kFrame, wi, sampler, mode)) sum += s->weight(kFrame)[0];
  }
  return sum / n;
}

TEST(Bsdf, WhiteFurnaceLambert) {
  const Bsdf b{Lambert{Spectrum::Ones()}};
  for (double theta : {0.0, 0.5, 1.2, kPi - 0.4}) {
    EXPECT_NEAR(albedo_estimate(b, direction(theta, 0.3), TransportMode::radiance, 200000), 1.0, 0.01);
  }
}

TEST(Bsdf, EnergyConservation) {
  const std::vector<Bsdf> models = {Bsdf{GlossyPhong{Spectrum::Ones(), 5.0}},
                                    Bsdf{GlossyPhong{Spectrum::Ones(), 100.0}}, Bsdf{Dielectric{1.5}},
                                    Bsdf{RoughDielectric{1.5, 0.1}}, Bsdf{RoughDielectric{1.5, 0.7}},
                                    Bsdf{Mirror{}}};
  for (const Bsdf& b : models) {
    for (double theta : {0.1, 0.8, 1.4, kPi - 0.3, kPi - 1.2}) {
      // Flux is carried in importance mode; radiance mode differs by eta^2.
      EXPECT_LE(albedo_estimate(b, direction(theta, 1.0), TransportMode::importance, 100000), 1.01);
    }
  }
  // Smooth glass loses nothing.
  EXPECT_NEAR(albedo_estimate(Bsdf{Dielectric{1.5}}, direction(0.7, 0), TransportMode::importance, 1000), 1.0,
              1e-12);
}

TEST(Ggx, SampledNormalsFollowProjectedDistribution) {
  // E[1 / (D cos)] over samples with density D cos equals the area of the
  // upper hemisphere.
  Sampler sampler(9);
  const double alpha = 0.4;
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector3 m = ggx::sample_normal(sampler.next_2d(), alpha);
    sum += 1.0 / (ggx::distribution(m, alpha) * m.z());
  }
  EXPECT_NEAR(sum / n, 2 * kPi, 0.02 * 2 * kPi);
}

}  // namespace
}  // namespace neb
