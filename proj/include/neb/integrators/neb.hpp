#pragma once

#include "neb/integrators/config.hpp"
#include "neb/integrators/framebuffer.hpp"
#include "neb/integrators/hash_grid.hpp"
#include "neb/math/sampling.hpp"
#include "neb/mis/path_pdfs.hpp"
#include "neb/octree/density_octree.hpp"
#include "neb/scene/scene.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace neb {

/// A camera-path vertex kept from the first pass together with its next
/// event estimate. Unoccluded records also act as virtual light sources.
struct NeeVertexRecord {
  SurfaceFrame frame;
  Vector3 wi = Vector3::Zero();  // toward the previous vertex
  Spectrum throughput = Spectrum::Ones();
  int pixel = 0;
  int depth = 0;  // vertex index, camera = 0
  int material = 0;
  PdfChain prefix;  // forward[0..depth-1], reverse[0..depth-2], specular[1..depth-1]
  // Segment from the previous vertex: |cos| there and squared length.
  double prev_cos = 1.0;
  double prev_dist2 = 1.0;
  NeeSample nee;
  Spectrum nee_f = Spectrum::Zero();  // f(wi, nee.direction)
  double nee_pdf_fwd = 0.0;           // BSDF density of nee.direction given wi
  double nee_pdf_rev = 0.0;           // BSDF density of wi given nee.direction
  double density = 0.0;               // filled in the second pass
};

/// A camera path that hit an emitter, weighted once the vertex count of the
/// iteration is known.
struct EmissionEvent {
  int pixel = 0;
  Spectrum weighted_emission = Spectrum::Zero();  // throughput * L_e
  PdfChain chain;      // complete, including the reverse emission density
  int last_record = -1;  // record at vertex length-1, -1 if none was stored
};

/// State of a photon that has just arrived at vertex y_m.
struct PhotonVertex {
  Vector3 position = Vector3::Zero();
  Vector3 direction = Vector3::Zero();  // travel direction into `position`
  double cos_here = 0.0;                // |cos| at y_m against the geometric normal
  Spectrum flux = Spectrum::Zero();
  int m = 0;
  bool light_photon = false;
  int source_record = -1;               // NEB photons: the emitting record
  double rho_emitter = 0.0;             // density at y_1
  // forward_area[t] = p(y_t -> y_{t+1}), t < m; backward_area[t] = p(y_t -> y_{t-1}), 1 <= t < m
  std::array<double, kMaxPathLength> forward_area{};
  std::array<double, kMaxPathLength> backward_area{};
  std::array<bool, kMaxPathLength> specular{};
  double light_pdf = 0.0;
  bool light_delta = false;
  // Segment y_{m-1} -> y_m: |cos| at its start and squared length.
  double prev_cos = 1.0;
  double prev_dist2 = 1.0;
};

struct MergeResult {
  int pixel = -1;
  Spectrum value = Spectrum::Zero();
  double weight = 0.0;
  int length = 0;
};

/// Photon-mapping style contribution splats recorded for inspection.
struct MergeLogEntry {
  int photon_vertex = 0;  // index into the photon log
  int record = 0;
  MergeResult result;
};

/// Three-pass renderer: (1) camera paths store their NEE vertices and
/// emitter hits, (2) every stored vertex contributes its NEE and emits a
/// photon carrying dE / density that is merged with nearby stored vertices,
/// (3) the emitter hits are weighted with the final vertex count.
class NebRenderer {
 public:
  NebRenderer(const Scene& scene, const RenderConfig& config);
  ~NebRenderer();

  void run_iteration();

  // The stages of run_iteration, exposed for tests.
  void begin_iteration();
  void pass1();
  void estimate_densities();
  void build_grid();
  void pass2_nee();
  void pass2_photons();
  void pass2_light_photons();
  void pass3();
  void end_iteration();

  /// Contribution of photon vertex `y` merged with record `record`,
  /// shared by both search directions.
  MergeResult merge(const NeeVertexRecord& record, const PhotonVertex& y) const;

  /// Balanced weights of the NEE estimate at a record.
  MisWeights nee_weights(const NeeVertexRecord& record) const;

  const std::vector<NeeVertexRecord>& records() const { return records_; }
  const std::vector<EmissionEvent>& emission_events() const { return events_; }
  const DensityOctree& octree() const { return *octree_; }
  const VertexHashGrid& grid() const { return grid_; }
  const FrameBuffer& framebuffer() const { return framebuffer_; }
  const PinholeCamera& camera() const { return camera_; }
  const RenderStats& stats() const { return stats_; }
  double radius() const { return radius_; }
  SamplerCounts sampler_counts() const;
  long long light_photon_count() const;

  /// Per-pixel totals of the current iteration, by estimator.
  const std::vector<Spectrum>& iteration_emission() const { return iter_emission_; }
  const std::vector<Spectrum>& iteration_nee() const { return iter_nee_; }
  const std::vector<Spectrum>& iteration_photons() const { return iter_photons_; }
  const std::vector<Spectrum>& iteration_light_photons() const { return iter_light_photons_; }

  /// When set, every photon vertex and merge of pass 2 is appended here.
  /// Only meaningful with one thread.
  void set_photon_log(std::vector<PhotonVertex>* vertices, std::vector<MergeLogEntry>* merges) {
    photon_log_ = vertices;
    merge_log_ = merges;
  }

 private:
  void trace_camera_path(int pixel, int thread);
  void trace_photon(PhotonVertex y, SurfaceFrame frame, int material, Vector3 wi, Sampler& sampler,
                    int thread);
  void merge_at(const PhotonVertex& y, int thread);

  const Scene& scene_;
  RenderConfig config_;
  PinholeCamera camera_;
  FrameBuffer framebuffer_;
  std::unique_ptr<DensityOctree> octree_;
  double radius_ = 0.0;
  int iteration_ = 0;  // 1-based while an iteration runs
  RenderStats stats_;

  std::vector<NeeVertexRecord> records_;
  std::vector<EmissionEvent> events_;
  std::vector<Vector3> record_positions_;
  VertexHashGrid grid_;

  std::vector<std::vector<NeeVertexRecord>> thread_records_;
  std::vector<std::vector<EmissionEvent>> thread_events_;
  std::unique_ptr<SplatBuffers> splat_emission_, splat_nee_, splat_photons_, splat_light_photons_;
  std::vector<long long> thread_photon_vertices_, thread_merges_;
  std::vector<Spectrum> iter_emission_, iter_nee_, iter_photons_, iter_light_photons_;

  std::vector<PhotonVertex>* photon_log_ = nullptr;
  std::vector<MergeLogEntry>* merge_log_ = nullptr;
};

FrameBuffer render_neb(const Scene& scene, const RenderConfig& config, RenderStats* stats = nullptr);

/// Flux of the virtual light at a record, dE / rho; zero when rho is 0.
Spectrum vertex_flux(const NeeVertexRecord& record, double rho);

}  // namespace neb
