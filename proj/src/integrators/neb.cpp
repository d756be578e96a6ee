#include "neb/integrators/neb.hpp"

#include "camera_walk.hpp"
#include "neb/integrators/parallel.hpp"
#include "neb/integrators/path_tracer.hpp"
#include "neb/math/plane_box.hpp"

#include <chrono>

namespace neb {

namespace {

constexpr std::uint64_t kPhotonStream = std::uint64_t{1} << 40;
constexpr std::uint64_t kLightPhotonStream = std::uint64_t{2} << 40;

// Density of the light emitting toward `w` from the sampled light point,
// converted to area measure at the receiver.
double emission_area_pdf(const Light& light, const Vector3& light_normal, const Vector3& w,
                         double cos_receiver, double dist2) {
  return emission_direction_pdf(light, light_normal, w) * cos_receiver / dist2;
}

}  // namespace

Spectrum vertex_flux(const NeeVertexRecord& record, double rho) {
  if (!(rho > 0.0) || record.nee.occluded) return Spectrum::Zero();
  return record.nee.irradiance / rho;
}

NebRenderer::NebRenderer(const Scene& scene, const RenderConfig& config)
    : scene_(scene), config_(config), camera_(configured_camera(scene, config)),
      framebuffer_(camera_.width, camera_.height) {
  config_.validate();
  octree_ = std::make_unique<DensityOctree>(scene.bounds().min(), scene.bounds().max(), config_.octree_capacity);
  radius_ = config_.radius_scale * scene.scene_scale();
}

NebRenderer::~NebRenderer() = default;

long long NebRenderer::light_photon_count() const {
  if (config_.integrator != IntegratorKind::neb_lp || scene_.lights.empty()) return 0;
  return config_.n_lp > 0 ? config_.n_lp : static_cast<long long>(camera_.width) * camera_.height;
}

SamplerCounts NebRenderer::sampler_counts() const {
  return {1.0, static_cast<double>(records_.size()), static_cast<double>(light_photon_count())};
}

void NebRenderer::begin_iteration() {
  ++iteration_;
  octree_->set_iteration(iteration_);
  const int threads = config_.threads;
  const int pixels = framebuffer_.pixel_count();
  thread_records_.assign(threads, {});
  thread_events_.assign(threads, {});
  thread_photon_vertices_.assign(threads, 0);
  thread_merges_.assign(threads, 0);
  splat_emission_ = std::make_unique<SplatBuffers>(threads, pixels);
  splat_nee_ = std::make_unique<SplatBuffers>(threads, pixels);
  splat_photons_ = std::make_unique<SplatBuffers>(threads, pixels);
  splat_light_photons_ = std::make_unique<SplatBuffers>(threads, pixels);
  records_.clear();
  events_.clear();
}

// ---------------------------------------------------------------------------
// Pass 1: camera paths

void NebRenderer::trace_camera_path(int pixel, int thread) {
  Sampler sampler(stream_seed(config_.seed, static_cast<std::uint64_t>(iteration_), static_cast<std::uint64_t>(pixel)));
  std::vector<NeeVertexRecord>& store = thread_records_[thread];
  detail::CameraWalk walk;
  walk.ray = camera_.generate_ray(pixel % camera_.width, pixel / camera_.width, sampler.next_2d());
  int last_record = -1;
  for (;;) {
    const std::optional<Intersection> its = scene_.intersect(walk.ray);
    if (!its) break;
    walk.advance(*its);
    const int k = walk.depth;
    if (its->light >= 0) {
      if (!is_black(its->emitted)) {
        EmissionEvent event;
        event.pixel = pixel;
        event.weighted_emission = walk.throughput * its->emitted;
        event.chain = walk.chain;
        event.chain.length = k;
        event.chain.light_pdf = scene_.light_area_pdf(its->light);
        event.chain.light_delta = false;
        event.chain.reverse[k - 1] =
            emission_direction_pdf(scene_.lights[its->light], its->frame.geometric_normal, its->wi) *
            walk.segment_cos_start / walk.segment_dist2;
        event.last_record = last_record;
        thread_events_[thread].push_back(event);
      }
      break;
    }
    const Bsdf& bsdf = scene_.bsdf(its->material);
    const bool delta = bsdf.is_delta();
    walk.chain.specular[k] = delta;
    last_record = -1;
    if (!delta && k < config_.max_depth) {
      NeeVertexRecord r;
      r.nee = scene_.sample_nee(its->frame, sampler);
      if (config_.occluded_records_count || r.nee.contributes()) {
        octree_->increment(its->frame.position);
        r.frame = its->frame;
        r.wi = its->wi;
        r.throughput = walk.throughput;
        r.pixel = pixel;
        r.depth = k;
        r.material = its->material;
        r.prefix = walk.chain;
        r.prefix.length = k;
        r.prev_cos = walk.segment_cos_start;
        r.prev_dist2 = walk.segment_dist2;
        if (r.nee.contributes()) {
          const BsdfEval e = bsdf_eval(bsdf, its->frame, its->wi, r.nee.direction);
          r.nee_f = e.f;
          r.nee_pdf_fwd = e.pdf_fwd;
          r.nee_pdf_rev = e.pdf_rev;
        }
        last_record = static_cast<int>(store.size());
        store.push_back(r);
      }
    }
    if (k >= config_.max_depth) break;

    const std::optional<BsdfSample> s = bsdf_sample(bsdf, its->frame, its->wi, sampler);
    if (!s) break;
    walk.throughput *= s->weight(its->frame);
    if (!is_finite(walk.throughput) || is_black(walk.throughput)) break;
    walk.bounce_pdf_fwd = s->pdf_fwd;
    walk.bounce_pdf_rev = s->pdf_rev;
    walk.ray = scene_.spawn_ray(its->frame.position, s->wo);
    if (!detail::russian_roulette(walk.throughput, k, sampler.next_1d())) break;
  }
}

void NebRenderer::pass1() {
  parallel_for(framebuffer_.pixel_count(), config_.threads,
               [&](long long p, int thread) { trace_camera_path(static_cast<int>(p), thread); });
  // Concatenate in thread order and rebase the record references.
  std::size_t total = 0;
  for (const auto& s : thread_records_) total += s.size();
  const long long capacity = config_.vertex_capacity > 0
                                 ? config_.vertex_capacity
                                 : static_cast<long long>(framebuffer_.pixel_count()) * config_.max_depth;
  if (static_cast<long long>(total) > capacity) {
    throw CapacityError("vertex store overflow: " + std::to_string(total) + " records needed, capacity " +
                            std::to_string(capacity),
                        static_cast<long long>(total));
  }
  records_.reserve(total);
  for (int t = 0; t < config_.threads; ++t) {
    const int offset = static_cast<int>(records_.size());
    for (EmissionEvent& e : thread_events_[t]) {
      if (e.last_record >= 0) e.last_record += offset;
      events_.push_back(e);
    }
    records_.insert(records_.end(), thread_records_[t].begin(), thread_records_[t].end());
    thread_records_[t].clear();
    thread_events_[t].clear();
  }
  stats_.records = static_cast<long long>(records_.size());
  stats_.emission_events = static_cast<long long>(events_.size());
}

// ---------------------------------------------------------------------------
// Pass 2

void NebRenderer::estimate_densities() {
  parallel_for(static_cast<long long>(records_.size()), config_.threads, [&](long long i, int) {
    records_[i].density = octree_->get_density_robust(records_[i].frame);
  });
}

void NebRenderer::build_grid() {
  record_positions_.resize(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) record_positions_[i] = records_[i].frame.position;
  grid_.build(record_positions_, scene_.bounds(), radius_);
}

MisWeights NebRenderer::nee_weights(const NeeVertexRecord& r) const {
  const int k = r.depth;
  const NeeSample& nee = r.nee;
  const double dist2 = nee.distance * nee.distance;
  PdfChain chain = r.prefix;
  chain.length = k + 1;
  chain.forward[k] = r.nee_pdf_fwd * nee.cos_light / dist2;
  chain.reverse[k - 1] = r.nee_pdf_rev * r.prev_cos / r.prev_dist2;
  chain.reverse[k] = emission_area_pdf(scene_.lights[nee.light], nee.light_normal, -nee.direction,
                                       std::abs(r.frame.geometric_normal.dot(nee.direction)), dist2);
  chain.specular[k] = false;
  chain.light_pdf = nee.light_pdf;
  chain.light_delta = nee.light_delta;
  const MergeContext merge{radius_, r.density, static_cast<double>(records_.size())};
  return mis_weights(chain, merge, sampler_counts());
}

void NebRenderer::pass2_nee() {
  parallel_for(static_cast<long long>(records_.size()), config_.threads, [&](long long i, int thread) {
    const NeeVertexRecord& r = records_[i];
    if (!r.nee.contributes() || is_black(r.nee_f)) return;
    const double w = nee_weights(r).nee;
    const Spectrum value = w * r.throughput * r.nee_f * r.nee.irradiance;
    if (is_finite(value)) splat_nee_->add(thread, r.pixel, value);
  });
}

MergeResult NebRenderer::merge(const NeeVertexRecord& r, const PhotonVertex& y) const {
  const int k = r.depth;
  const int m = y.m;
  const int length = k + m;
  if (length > config_.max_depth || (!y.light_photon && m < 2) || m < 1) return {};
  const Vector3 to_prev = -y.direction;
  const BsdfEval e = bsdf_eval(scene_.bsdf(r.material), r.frame, r.wi, to_prev);
  if (is_black(e.f)) return {};

  PdfChain chain = r.prefix;
  chain.length = length;
  chain.forward[k] = e.pdf_fwd * y.prev_cos / y.prev_dist2;
  chain.reverse[k - 1] = e.pdf_rev * r.prev_cos / r.prev_dist2;
  chain.specular[k] = false;
  for (int t = 1; t < m; ++t) {
    chain.forward[k + t] = y.backward_area[m - t];
    chain.specular[k + t] = y.specular[m - t];
  }
  for (int t = 1; t <= m; ++t) chain.reverse[k + t - 1] = y.forward_area[m - t];
  chain.light_pdf = y.light_pdf;
  chain.light_delta = y.light_delta;

  const double rho = (y.light_photon && m == 1) ? r.density : y.rho_emitter;
  const MergeContext ctx{radius_, rho, static_cast<double>(records_.size())};
  const MisWeights w = mis_weights(chain, ctx, sampler_counts());
  MergeResult result;
  result.pixel = r.pixel;
  result.length = length;
  result.weight = y.light_photon ? w.light_photon[k] : w.photon[k];
  result.value = result.weight * r.throughput * e.f * y.flux * uniform_kernel(radius_);
  return result;
}

void NebRenderer::merge_at(const PhotonVertex& y, int thread) {
  const int photon_index = photon_log_ ? static_cast<int>(photon_log_->size()) : -1;
  if (photon_log_) photon_log_->push_back(y);
  SplatBuffers& target = y.light_photon ? *splat_light_photons_ : *splat_photons_;
  grid_.query(y.position, [&](int index) {
    const MergeResult res = merge(records_[index], y);
    if (res.pixel < 0 || !is_finite(res.value)) return;
    ++thread_merges_[thread];
    target.add(thread, res.pixel, res.value);
    if (merge_log_) merge_log_->push_back({photon_index, index, res});
  });
}

void NebRenderer::trace_photon(PhotonVertex y, SurfaceFrame frame, int material, Vector3 wi, Sampler& sampler,
                               int thread) {
  Spectrum relative = Spectrum::Ones();
  for (;;) {
    const Bsdf& bsdf = scene_.bsdf(material);
    const bool delta = bsdf.is_delta();
    y.specular[y.m] = delta;
    ++thread_photon_vertices_[thread];
    if (!delta && y.m >= (y.light_photon ? 1 : 2)) merge_at(y, thread);
    // A further vertex y_{m+1} needs at least one camera segment as well.
    if (y.m + 2 > config_.max_depth) break;

    const std::optional<BsdfSample> s = bsdf_sample(bsdf, frame, wi, sampler, TransportMode::importance);
    if (!s) break;
    const Spectrum weight = s->weight(frame);
    y.flux *= weight;
    relative *= weight;
    if (!is_finite(y.flux) || is_black(y.flux)) break;

    const std::optional<Intersection> its = scene_.intersect(scene_.spawn_ray(frame.position, s->wo));
    if (!its || its->light >= 0) break;
    const double cos_next = std::abs(its->frame.geometric_normal.dot(s->wo));
    const double dist2 = its->distance * its->distance;
    y.forward_area[y.m] = s->pdf_fwd * cos_next / dist2;
    y.backward_area[y.m] = s->pdf_rev * y.prev_cos / y.prev_dist2;
    y.prev_cos = std::abs(frame.geometric_normal.dot(s->wo));
    y.prev_dist2 = dist2;
    ++y.m;
    y.position = its->frame.position;
    y.direction = s->wo;
    y.cos_here = cos_next;
    frame = its->frame;
    material = its->material;
    wi = its->wi;

    const Spectrum before = relative;
    if (!detail::russian_roulette(relative, y.m - 1, sampler.next_1d())) break;
    y.flux *= relative / before;
  }
}

void NebRenderer::pass2_photons() {
  parallel_for(static_cast<long long>(records_.size()), config_.threads, [&](long long i, int thread) {
    const NeeVertexRecord& r = records_[i];
    if (!r.nee.contributes() || !(r.density > 0.0)) return;
    Sampler sampler(stream_seed(config_.seed, static_cast<std::uint64_t>(iteration_),
                                kPhotonStream + static_cast<std::uint64_t>(i)));
    const NeeSample& nee = r.nee;
    PhotonVertex y;
    y.position = r.frame.position;
    y.direction = -nee.direction;
    y.m = 1;
    y.flux = vertex_flux(r, r.density);
    y.source_record = static_cast<int>(i);
    y.rho_emitter = r.density;
    y.light_pdf = nee.light_pdf;
    y.light_delta = nee.light_delta;
    const double dist2 = nee.distance * nee.distance;
    y.cos_here = std::abs(r.frame.geometric_normal.dot(nee.direction));
    y.forward_area[0] =
        emission_area_pdf(scene_.lights[nee.light], nee.light_normal, -nee.direction, y.cos_here, dist2);
    y.prev_cos = nee.cos_light;
    y.prev_dist2 = dist2;
    trace_photon(y, r.frame, r.material, nee.direction, sampler, thread);
  });
}

void NebRenderer::pass2_light_photons() {
  const long long n = light_photon_count();
  if (n == 0) return;
  const double pick = scene_.light_pick_pdf();
  parallel_for(n, config_.threads, [&](long long i, int thread) {
    Sampler sampler(stream_seed(config_.seed, static_cast<std::uint64_t>(iteration_),
                                kLightPhotonStream + static_cast<std::uint64_t>(i)));
    const int nl = static_cast<int>(scene_.lights.size());
    const int li = std::min(nl - 1, static_cast<int>(sampler.next_1d() * nl));
    const Vector2 u_pos = sampler.next_2d();
    const EmissionSample em = sample_emission(scene_.lights[li], pick, u_pos, sampler.next_2d());
    if (is_black(em.flux) || !(em.pdf_direction > 0.0)) return;
    const std::optional<Intersection> its = scene_.intersect(scene_.spawn_ray(em.position, em.direction));
    if (!its || its->light >= 0) return;
    PhotonVertex y;
    y.light_photon = true;
    y.position = its->frame.position;
    y.direction = em.direction;
    y.m = 1;
    y.flux = em.flux / static_cast<double>(n);
    y.light_pdf = em.pdf_area;
    y.light_delta = em.delta_position;
    const double dist2 = its->distance * its->distance;
    y.cos_here = std::abs(its->frame.geometric_normal.dot(em.direction));
    y.forward_area[0] = em.pdf_direction * y.cos_here / dist2;
    y.prev_cos = em.delta_position ? 1.0 : std::abs(em.normal.dot(em.direction));
    y.prev_dist2 = dist2;
    y.rho_emitter = octree_->get_density_robust(its->frame);
    trace_photon(y, its->frame, its->material, its->wi, sampler, thread);
  });
}

// ---------------------------------------------------------------------------
// Pass 3: emitter hits

void NebRenderer::pass3() {
  const SamplerCounts counts = sampler_counts();
  parallel_for(static_cast<long long>(events_.size()), config_.threads, [&](long long i, int thread) {
    const EmissionEvent& e = events_[i];
    const double rho = e.last_record >= 0 ? records_[e.last_record].density : 0.0;
    const MergeContext ctx{radius_, rho, static_cast<double>(records_.size())};
    const double w = mis_weights(e.chain, ctx, counts).random_hit;
    const Spectrum value = w * e.weighted_emission;
    if (is_finite(value)) splat_emission_->add(thread, e.pixel, value);
  });
}

void NebRenderer::end_iteration() {
  iter_emission_ = splat_emission_->reduce();
  iter_nee_ = splat_nee_->reduce();
  iter_photons_ = splat_photons_->reduce();
  iter_light_photons_ = splat_light_photons_->reduce();
  std::vector<Spectrum> total = iter_emission_;
  for (std::size_t p = 0; p < total.size(); ++p) {
    total[p] += iter_nee_[p] + iter_photons_[p] + iter_light_photons_[p];
  }
  framebuffer_.accumulate(total);
  framebuffer_.finish_iteration();
  stats_.iterations = framebuffer_.iterations();
  stats_.photon_vertices = 0;
  stats_.merges = 0;
  for (long long v : thread_photon_vertices_) stats_.photon_vertices += v;
  for (long long v : thread_merges_) stats_.merges += v;
}

void NebRenderer::run_iteration() {
  begin_iteration();
  pass1();
  estimate_densities();
  build_grid();
  pass2_nee();
  pass2_photons();
  pass2_light_photons();
  pass3();
  end_iteration();
}

FrameBuffer render_neb(const Scene& scene, const RenderConfig& config, RenderStats* stats) {
  NebRenderer neb(scene, config);
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  for (int i = 0;; ++i) {
    if (config.time_budget > 0.0 ? elapsed() >= config.time_budget : i >= config.iterations) break;
    neb.run_iteration();
  }
  if (stats) {
    *stats = neb.stats();
    stats->iterations = neb.framebuffer().iterations();
    stats->seconds = elapsed();
  }
  return neb.framebuffer();
}

}  // namespace neb
