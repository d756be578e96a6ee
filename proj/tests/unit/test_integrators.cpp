#include "neb/integrators/hash_grid.hpp"
#include "neb/integrators/neb.hpp"
#include "neb/integrators/parallel.hpp"
#include "neb/integrators/path_tracer.hpp"
#include "neb/integrators/render.hpp"
#include "neb/math/plane_box.hpp"
#include "neb/scene/loader.hpp"
#include "caustic_region.hpp"
#include "neb/io/image.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <atomic>
#include <cstring>
#include <fstream>
#include <map>
#include <random>

namespace neb {
namespace {

RenderConfig config_for(IntegratorKind kind, int iterations, int width = 0, int height = 0) {
  RenderConfig c;
  c.integrator = kind;
  c.iterations = iterations;
  c.width = width;
  c.height = height;
  c.threads = 1;
  return c;
}

// A diffuse floor at y = 0 with a downward-facing square light at height h.
Scene lit_floor(double albedo, double h, bool point_light = false) {
  Scene s;
  const int m = s.add_material("floor", Bsdf{Lambert{Spectrum::Constant(albedo)}});
  s.add_quad(Vector3(-10, 0, -10), Vector3(0, 0, 20), Vector3(20, 0, 0), m);
  if (point_light) {
    s.lights.push_back(PointLight{Vector3(0, h, 0), Spectrum::Constant(3.0)});
  } else {
    s.add_area_light(AreaLight{Vector3(-0.5, h, -0.5), Vector3(1, 0, 0), Vector3(0, 0, 1), Spectrum::Ones()});
  }
  s.camera.position = Vector3(0, 0.5, 3);
  s.camera.look_at = Vector3(0, 0, 0);
  s.camera.vertical_fov = 0.5;
  s.camera.width = 3;
  s.camera.height = 3;
  s.finalize();
  return s;
}

TEST(Parallel, CoversEveryIndexOnce) {
  for (int threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, threads, [&](long long i, int t) {
      EXPECT_LT(t, threads);
      ++hits[i];
    });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(VertexHashGrid, MatchesLinearScan) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double radius : {0.01, 0.05, 0.3}) {
    std::vector<Vector3> points(5000);
    for (auto& p : points) p = Vector3(u(rng), u(rng), 0.2 * u(rng));
    VertexHashGrid grid;
    grid.build(points, Aabb(Vector3::Constant(-1), Vector3::Constant(1)), radius);
    for (int q = 0; q < 500; ++q) {
      const Vector3 c(u(rng), u(rng), 0.2 * u(rng));
      std::vector<int> found;
      grid.query(c, [&](int i) { found.push_back(i); });
      std::sort(found.begin(), found.end());
      std::vector<int> expected;
      for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        if ((points[i] - c).squaredNorm() <= radius * radius) expected.push_back(i);
      }
      EXPECT_EQ(found, expected);
    }
  }
}

TEST(VertexHashGrid, EmptyAndOutOfBounds) {
  VertexHashGrid grid;
  const std::vector<Vector3> none, outside = {Vector3(5, 5, 5)};
  grid.build(none, Aabb(Vector3::Zero(), Vector3::Ones()), 0.1);
  int n = 0;
  grid.query(Vector3::Zero(), [&](int) { ++n; });
  EXPECT_EQ(n, 0);
  grid.build(outside, Aabb(Vector3::Zero(), Vector3::Ones()), 0.1);
  grid.query(Vector3(5.05, 5, 5), [&](int) { ++n; });
  EXPECT_EQ(n, 1);
}

TEST(FrameBuffer, AveragesIterations) {
  FrameBuffer fb(2, 1);
  fb.accumulate({Spectrum::Constant(1.0), Spectrum::Constant(2.0)});
  fb.finish_iteration();
  fb.accumulate({Spectrum::Constant(3.0), Spectrum::Constant(0.0)});
  fb.finish_iteration();
  EXPECT_DOUBLE_EQ(fb.pixel(0, 0)[0], 2.0);
  EXPECT_DOUBLE_EQ(fb.pixel(1, 0)[0], 1.0);
  SplatBuffers splats(3, 2);
  splats.add(0, 1, Spectrum::Ones());
  splats.add(2, 1, Spectrum::Ones());
  EXPECT_DOUBLE_EQ(splats.reduce()[1][0], 2.0);
}

TEST(Config, Validation) {
  RenderConfig c;
  EXPECT_NO_THROW(c.validate());
  c.max_depth = 16;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.max_depth = 10;
  c.radius_scale = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_integrator("neb_lp"), IntegratorKind::neb_lp);
  EXPECT_THROW(parse_integrator("bdpt"), std::invalid_argument);
}

TEST(PathTracer, BlackSceneRendersBlack) {
  Scene s;
  const int m = s.add_material("m", Bsdf{Lambert{}});
  s.add_quad(Vector3(-1, -1, 0), Vector3(2, 0, 0), Vector3(0, 2, 0), m);
  s.finalize();
  for (IntegratorKind kind : {IntegratorKind::pt, IntegratorKind::neb, IntegratorKind::neb_lp}) {
    const Image img = render(s, config_for(kind, 2, 4, 4)).image();
    for (float v : img.rgb) EXPECT_EQ(v, 0.0f);
  }
}

// Camera looking straight at the emitting side of an area light.
Scene visible_emitter() {
  Scene s;
  s.add_area_light(AreaLight{Vector3(-5, -5, 0), Vector3(10, 0, 0), Vector3(0, 10, 0), Spectrum(1, 2, 3)});
  s.camera.position = Vector3(0, 0, 3);
  s.camera.look_at = Vector3::Zero();
  s.camera.width = 4;
  s.camera.height = 4;
  s.finalize();
  return s;
}

TEST(PathTracer, VisibleEmitterIsExact) {
  const Scene s = visible_emitter();
  for (IntegratorKind kind : {IntegratorKind::pt, IntegratorKind::neb, IntegratorKind::neb_lp}) {
    const Image img = render(s, config_for(kind, 3)).image();
    for (int p = 0; p < 16; ++p) {
      EXPECT_FLOAT_EQ(img.rgb[3 * p + 0], 1.0f);
      EXPECT_FLOAT_EQ(img.rgb[3 * p + 1], 2.0f);
      EXPECT_FLOAT_EQ(img.rgb[3 * p + 2], 3.0f);
    }
  }
}

// Radiance of the floor point seen by the center pixel, from the on-axis
// irradiance of a square source, corrected to the actual hit point by
// numerical integration over the light.
double analytic_floor_radiance(const Scene& s, double albedo) {
  const Ray ray = s.camera.generate_ray(1, 1, Vector2(0.5, 0.5));
  const Vector3 x = ray.at(-ray.origin.y() / ray.direction.y());
  const auto& light = std::get<AreaLight>(s.lights[0]);
  const int n = 400;
  double irradiance = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vector3 y = light.corner + (i + 0.5) / n * light.edge1 + (j + 0.5) / n * light.edge2;
      const Vector3 d = y - x;
      const double r2 = d.squaredNorm();
      const double cos_x = d.y() / std::sqrt(r2);
      irradiance += cos_x * cos_x / r2 * light.area() / (n * n);  // cos_y = cos_x here
    }
  }
  return albedo / kPi * irradiance;
}

TEST(PathTracer, DirectlyLitPlaneMatchesAnalyticIrradiance) {
  const double albedo = 0.6;
  Scene s = lit_floor(albedo, 1.0);
  RenderConfig c = config_for(IntegratorKind::pt, 4096);
  c.max_depth = 2;  // a single bounce is all there is
  const Image img = render(s, c).image();
  const double expected = analytic_floor_radiance(s, albedo);
  EXPECT_NEAR(img.pixel(1, 1)[0], expected, 0.01 * expected);
}

TEST(PathTracer, PointLightIsNoiseFree) {
  Scene s = lit_floor(0.5, 2.0, true);
  const Image img = render(s, config_for(IntegratorKind::pt, 1)).image();
  const Ray ray = s.camera.generate_ray(1, 1, Vector2(0.5, 0.5));
  const Vector3 x = ray.at(-ray.origin.y() / ray.direction.y());
  const Vector3 d = Vector3(0, 2, 0) - x;
  const double expected = 0.5 / kPi * 3.0 * (d.y() / d.norm()) / d.squaredNorm();
  // The pixel jitter moves the hit point by a tiny amount.
  EXPECT_NEAR(img.pixel(1, 1)[0], expected, 1e-3 * expected);
}

TEST(Neb, RecordsAndDensityBookkeeping) {
  const Scene s = lit_floor(0.5, 1.0);
  RenderConfig c = config_for(IntegratorKind::neb, 1, 8, 8);
  c.max_depth = 2;
  NebRenderer neb(s, c);
  neb.begin_iteration();
  neb.pass1();
  // Every camera ray hits the floor: one record per pixel at depth 1.
  ASSERT_EQ(neb.records().size(), 64u);
  for (const auto& r : neb.records()) EXPECT_EQ(r.depth, 1);
  const DensityOctree& tree = neb.octree();
  EXPECT_EQ(tree.reachable_counter_sum(),
            64 + tree.split_count() * (8LL * tree.preset_value() - tree.split_count_density()));
  neb.estimate_densities();
  neb.build_grid();
  EXPECT_EQ(neb.sampler_counts().n_photon, static_cast<double>(neb.records().size()));
  EXPECT_EQ(neb.sampler_counts().n_nee, 1.0);
  EXPECT_EQ(neb.sampler_counts().n_light_photon, 0.0);
  for (const auto& r : neb.records()) EXPECT_GT(r.density, 0.0);
}

TEST(Neb, EscapingRaysStoreNothing) {
  Scene s;
  const int m = s.add_material("m", Bsdf{Lambert{}});
  s.spheres.push_back({Vector3(0, 0, -50), 1.0, m});
  s.lights.push_back(PointLight{Vector3(0, 5, 0), Spectrum::Ones()});
  s.camera.look_at = Vector3(0, 0, 10);
  s.finalize();
  NebRenderer neb(s, config_for(IntegratorKind::neb, 1, 4, 4));
  neb.run_iteration();
  EXPECT_TRUE(neb.records().empty());
  EXPECT_TRUE(neb.emission_events().empty());
}

TEST(Neb, EmptyStoreGivesNoContributions) {
  Scene s;
  const int m = s.add_material("m", Bsdf{Lambert{}});
  s.spheres.push_back({Vector3(0, 0, -50), 1.0, m});
  s.add_area_light(AreaLight{Vector3(-1, 0, -40), Vector3(2, 0, 0), Vector3(0, 2, 0), Spectrum::Ones()});
  s.camera.look_at = Vector3(0, 0, 10);
  s.finalize();
  NebRenderer neb(s, config_for(IntegratorKind::neb_lp, 1, 4, 4));
  neb.run_iteration();
  ASSERT_TRUE(neb.records().empty());
  for (const auto* buffer : {&neb.iteration_emission(), &neb.iteration_nee(), &neb.iteration_photons(),
                             &neb.iteration_light_photons()}) {
    for (const Spectrum& v : *buffer) EXPECT_TRUE(is_black(v));
  }
  EXPECT_EQ(mean_luminance(neb.framebuffer().image()), 0.0);
}

TEST(Neb, PointLightNeverProducesEmissionEvents) {
  Scene s = load_builtin_scene("cornell_diffuse");
  s.lights.clear();
  s.lights.push_back(PointLight{Vector3(0, 1.5, 0), Spectrum::Constant(5.0)});
  for (Triangle& t : s.triangles) t.light = -1;
  s.finalize();
  NebRenderer neb(s, config_for(IntegratorKind::neb, 1, 16, 16));
  neb.run_iteration();
  EXPECT_TRUE(neb.emission_events().empty());
  EXPECT_FALSE(neb.records().empty());
  EXPECT_GT(luminance(neb.framebuffer().pixel(8, 8)), 0.0);
}

TEST(Neb, VertexStoreOverflowReportsRequiredCapacity) {
  RenderConfig c = config_for(IntegratorKind::neb, 1, 8, 8);
  c.vertex_capacity = 10;
  const Scene s = lit_floor(0.5, 1.0);
  NebRenderer neb(s, c);
  neb.begin_iteration();
  try {
    neb.pass1();
    FAIL();
  } catch (const CapacityError& e) {
    EXPECT_EQ(e.required_capacity, 64);
  }
}

TEST(Neb, ContributionsAreFiniteAndNonnegative) {
  for (const std::string& name : builtin_scene_names()) {
    const Scene s = load_builtin_scene(name);
    RenderConfig c = config_for(IntegratorKind::neb_lp, 1, 24, 24);
    NebRenderer neb(s, c);
    for (int it = 0; it < 2; ++it) {
      neb.run_iteration();
      for (const auto* buffer : {&neb.iteration_emission(), &neb.iteration_nee(), &neb.iteration_photons(),
                                 &neb.iteration_light_photons()}) {
        for (const Spectrum& v : *buffer) {
          EXPECT_TRUE(is_finite(v)) << name;
          EXPECT_GE(v.minCoeff(), 0.0) << name;
        }
      }
    }
  }
}

TEST(Neb, DeterministicWithOneThread) {
  const Scene s = load_builtin_scene("mirror_box");
  const RenderConfig c = config_for(IntegratorKind::neb_lp, 2, 24, 24);
  const Image a = render_neb(s, c).image();
  const Image b = render_neb(s, c).image();
  ASSERT_EQ(a.rgb.size(), b.rgb.size());
  EXPECT_EQ(std::memcmp(a.rgb.data(), b.rgb.data(), a.rgb.size() * sizeof(float)), 0);
}

TEST(Neb, NebPhotonsNeverMergeAtTheirEmitter) {
  const Scene s = load_builtin_scene("cornell_diffuse");
  NebRenderer neb(s, config_for(IntegratorKind::neb, 1, 16, 16));
  std::vector<PhotonVertex> vertices;
  std::vector<MergeLogEntry> merges;
  neb.set_photon_log(&vertices, &merges);
  neb.run_iteration();
  ASSERT_FALSE(merges.empty());
  for (const MergeLogEntry& m : merges) EXPECT_GE(vertices[m.photon_vertex].m, 2);
  // Asking for a merge at the emitter itself yields nothing.
  PhotonVertex y = vertices.front();
  y.m = 1;
  y.light_photon = false;
  EXPECT_LT(neb.merge(neb.records().front(), y).pixel, 0);
}

// The photon pass looks up stored vertices around each photon. Looking up
// photons around each stored vertex instead, with the same frozen photon
// trace, must give the same contributions.
TEST(Neb, PhotonMergeSearchDirectionsAgree) {
  for (IntegratorKind kind : {IntegratorKind::neb, IntegratorKind::neb_lp}) {
    const Scene s = load_builtin_scene("cornell_diffuse");
    RenderConfig c = config_for(kind, 1, 16, 16);
    c.radius_scale = 0.02;
    NebRenderer neb(s, c);
    std::vector<PhotonVertex> vertices;
    std::vector<MergeLogEntry> merges;
    neb.set_photon_log(&vertices, &merges);
    neb.run_iteration();

    const int pixels = 16 * 16;
    std::vector<Spectrum> by_vertex(pixels, Spectrum::Zero());
    std::map<std::pair<int, int>, double> pairs;
    const double r2 = neb.radius() * neb.radius();
    for (int ri = 0; ri < static_cast<int>(neb.records().size()); ++ri) {
      const NeeVertexRecord& rec = neb.records()[ri];
      for (int vi = 0; vi < static_cast<int>(vertices.size()); ++vi) {
        const PhotonVertex& y = vertices[vi];
        if ((y.position - rec.frame.position).squaredNorm() > r2) continue;
        const MergeResult res = neb.merge(rec, y);
        if (res.pixel < 0) continue;
        by_vertex[res.pixel] += res.value;
        pairs[{vi, ri}] = res.value.sum();
      }
    }
    std::map<std::pair<int, int>, double> logged;
    for (const MergeLogEntry& m : merges) logged[{m.photon_vertex, m.record}] = m.result.value.sum();
    EXPECT_EQ(logged, pairs);
    EXPECT_FALSE(pairs.empty());

    const auto& splatted = kind == IntegratorKind::neb ? neb.iteration_photons() : neb.iteration_light_photons();
    std::vector<Spectrum> light_or_neb(pixels, Spectrum::Zero());
    for (const MergeLogEntry& m : merges) {
      if (vertices[m.photon_vertex].light_photon == (kind == IntegratorKind::neb_lp)) {
        light_or_neb[m.result.pixel] += m.result.value;
      }
    }
    for (int p = 0; p < pixels; ++p) {
      EXPECT_NEAR((light_or_neb[p] - splatted[p]).abs().maxCoeff(), 0.0, 1e-9 * (1 + splatted[p].maxCoeff()));
    }
  }
}

TEST(VertexFlux, Examples) {
  NeeVertexRecord r;
  r.nee.irradiance = Spectrum::Constant(2.0);
  EXPECT_DOUBLE_EQ(vertex_flux(r, 4.0)[0], 0.5);
  EXPECT_TRUE(is_black(vertex_flux(r, 0.0)));
  EXPECT_LT(vertex_flux(r, 1e12)[0], 1e-11);
  r.nee.occluded = true;
  EXPECT_TRUE(is_black(vertex_flux(r, 4.0)));
}

// Records uniform on the plane z = 0.4 across the whole tree, lit by a unit
// point light. The tree accumulates over iterations as in the renderer; the
// flux sum of each iteration is a consistent estimate of the irradiance
// integral over the plane.
TEST(VertexFlux, FluxSumsToIrradianceIntegral) {
  const int n = 50000;
  DensityOctree tree(Vector3::Zero(), Vector3::Ones(), 1 << 20);
  const Aabb box = tree.bounds();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(box.min().x(), box.max().x()), uy(box.min().y(), box.max().y());
  const Vector3 light(0.5, 0.5, 1.4);
  const auto irradiance = [&](const Vector3& p) {
    const Vector3 d = light - p;
    return d.z() / std::pow(d.norm(), 3.0);
  };
  double integral = 0.0;
  const int q = 400;
  const Vector3 extent = box.sizes();
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const Vector3 p(box.min().x() + extent.x() * (i + 0.5) / q, box.min().y() + extent.y() * (j + 0.5) / q, 0.4);
      integral += irradiance(p) * extent.x() * extent.y() / (q * q);
    }
  }
  std::vector<double> errors;
  for (int it = 1; it <= 16; ++it) {
    tree.set_iteration(it);
    std::vector<Vector3> points(n);
    for (auto& p : points) {
      p = Vector3(ux(rng), uy(rng), 0.4);
      tree.increment(p);
    }
    double flux = 0.0;
    for (const Vector3& p : points) {
      NeeVertexRecord r;
      r.nee.irradiance = Spectrum::Constant(irradiance(p));
      flux += vertex_flux(r, tree.get_density_robust(SurfaceFrame::from_normal(p, Vector3::UnitZ())))[0];
    }
    errors.push_back(std::abs(flux - integral) / integral);
  }
  EXPECT_LT(errors.back(), 0.05);
  EXPECT_LT(errors.back(), errors.front());
}

TEST(Neb, AgreesWithPathTracerOnDiffuseBox) {
  const Scene s = load_builtin_scene("cornell_diffuse");
  RenderConfig pt = config_for(IntegratorKind::pt, 256, 16, 16);
  pt.threads = default_thread_count();
  RenderConfig nb = pt;
  nb.integrator = IntegratorKind::neb;
  nb.iterations = 64;
  const double a = mean_luminance(render(s, pt).image());
  const double b = mean_luminance(render(s, nb).image());
  EXPECT_NEAR(b, a, 0.02 * a);
}

TEST(Neb, ErrorAgainstPathTracerShrinksWithIterations) {
  const Scene s = load_builtin_scene("cornell_diffuse");
  RenderConfig pt = config_for(IntegratorKind::pt, 4096, 16, 16);
  pt.threads = default_thread_count();
  const Image reference = render(s, pt).image();
  RenderConfig c = config_for(IntegratorKind::neb, 0, 16, 16);
  c.threads = pt.threads;
  NebRenderer neb(s, c);
  std::vector<double> errors;
  for (int it = 1; it <= 256; ++it) {
    neb.run_iteration();
    if ((it & (it - 1)) == 0 && it >= 4) errors.push_back(rmse(neb.framebuffer().image(), reference));
  }
  // Checkpoints at 4, 8, ..., 256 iterations; allow noise between
  // neighbors but require the trend over each factor of four.
  for (std::size_t i = 2; i < errors.size(); ++i) EXPECT_LT(errors[i], errors[i - 2]) << i;
  EXPECT_LT(errors.back(), 0.5 * errors.front());
}

// The region oracle is a long per-pixel path traced run cached by
// `neb_acceptance --generate caustic_sphere_region_pt`.
TEST(Neb, CausticRegionMatchesPathTracedMean) {
  const std::string path = std::string(NEB_TEST_DATA_DIR) + "/caustic_sphere_region_pt.json";
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing " << path;
  const double oracle = nlohmann::json::parse(in).at("mean_luminance").get<double>();
  const Scene s = load_builtin_scene("caustic_sphere");
  const std::vector<bool> mask = testing::caustic_mask(s);
  RenderConfig c = config_for(IntegratorKind::neb, 200);
  c.threads = default_thread_count();
  const FrameBuffer fb = render(s, c);
  double sum = 0.0;
  int n = 0;
  for (int p = 0; p < static_cast<int>(mask.size()); ++p) {
    if (!mask[p]) continue;
    sum += luminance(fb.pixel(p % s.camera.width, p / s.camera.width));
    ++n;
  }
  ASSERT_GT(n, 0);
  EXPECT_NEAR(sum / n, oracle, 0.1 * oracle);
}

TEST(Neb, TimeBudgetStopsAfterFirstIterationPastBudget) {
  const Scene s = load_builtin_scene("cornell_diffuse");
  RenderConfig c = config_for(IntegratorKind::neb, 0, 8, 8);
  c.time_budget = 0.2;
  RenderStats stats;
  render(s, c, &stats);
  EXPECT_GE(stats.iterations, 1);
  EXPECT_GE(stats.seconds, 0.2);
}

}  // namespace
}  // namespace neb
