#include "neb/integrators/path_tracer.hpp"

#include "camera_walk.hpp"
#include "neb/integrators/parallel.hpp"

#include <chrono>

namespace neb {

PinholeCamera configured_camera(const Scene& scene, const RenderConfig& config) {
  PinholeCamera camera = scene.camera;
  if (config.width > 0) camera.width = config.width;
  if (config.height > 0) camera.height = config.height;
  return camera;
}

PathTracer::PathTracer(const Scene& scene, const RenderConfig& config)
    : scene_(scene), config_(config), camera_(configured_camera(scene, config)),
      framebuffer_(camera_.width, camera_.height) {
  config_.validate();
}

Spectrum PathTracer::trace_pixel(int x, int y, Sampler& sampler) const {
  detail::CameraWalk walk;
  walk.ray = camera_.generate_ray(x, y, sampler.next_2d());
  const SamplerCounts counts{1.0, 0.0, 0.0};
  const MergeContext no_merge{};
  Spectrum radiance = Spectrum::Zero();
  for (;;) {
    const std::optional<Intersection> its = scene_.intersect(walk.ray);
    if (!its) break;
    walk.advance(*its);
    const int k = walk.depth;
    if (its->light >= 0) {
      if (!is_black(its->emitted)) {
        PdfChain chain = walk.chain;
        chain.length = k;
        chain.light_pdf = scene_.light_area_pdf(its->light);
        chain.light_delta = false;
        const double w = mis_weights(chain, no_merge, counts).random_hit;
        radiance += w * walk.throughput * its->emitted;
      }
      break;
    }
    const Bsdf& bsdf = scene_.bsdf(its->material);
    const bool delta = bsdf.is_delta();
    walk.chain.specular[k] = delta;
    if (k >= config_.max_depth) break;

    if (!delta) {
      const NeeSample nee = scene_.sample_nee(its->frame, sampler);
      if (nee.contributes()) {
        const BsdfEval e = bsdf_eval(bsdf, its->frame, its->wi, nee.direction);
        if (!is_black(e.f)) {
          PdfChain chain = walk.chain;
          chain.length = k + 1;
          chain.forward[k] = e.pdf_fwd * nee.cos_light / (nee.distance * nee.distance);
          chain.light_pdf = nee.light_pdf;
          chain.light_delta = nee.light_delta;
          const double w = mis_weights(chain, no_merge, counts).nee;
          radiance += w * walk.throughput * e.f * nee.irradiance;
        }
      }
    }

    const std::optional<BsdfSample> s = bsdf_sample(bsdf, its->frame, its->wi, sampler);
    if (!s) break;
    walk.throughput *= s->weight(its->frame);
    if (!is_finite(walk.throughput) || is_black(walk.throughput)) break;
    walk.bounce_pdf_fwd = s->pdf_fwd;
    walk.bounce_pdf_rev = s->pdf_rev;
    walk.ray = scene_.spawn_ray(its->frame.position, s->wo);
    if (!detail::russian_roulette(walk.throughput, k, sampler.next_1d())) break;
  }
  return radiance;
}

void PathTracer::run_iteration() {
  const int iteration = framebuffer_.iterations();
  const int pixels = camera_.width * camera_.height;
  std::vector<Spectrum> contributions(pixels, Spectrum::Zero());
  parallel_for(pixels, config_.threads, [&](long long p, int) {
    Sampler sampler(stream_seed(config_.seed, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(p)));
    const Spectrum l = trace_pixel(static_cast<int>(p % camera_.width), static_cast<int>(p / camera_.width), sampler);
    if (is_finite(l)) contributions[p] = l;
  });
  framebuffer_.accumulate(contributions);
  framebuffer_.finish_iteration();
}

FrameBuffer render_pt(const Scene& scene, const RenderConfig& config, RenderStats* stats) {
  PathTracer pt(scene, config);
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  for (int i = 0;; ++i) {
    if (config.time_budget > 0.0 ? elapsed() >= config.time_budget : i >= config.iterations) break;
    pt.run_iteration();
  }
  if (stats) {
    stats->iterations = pt.framebuffer().iterations();
    stats->seconds = elapsed();
  }
  return pt.framebuffer();
}

}  // namespace neb
