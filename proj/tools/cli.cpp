#include "cli.hpp"

#include "neb/integrators/parallel.hpp"
#include "neb/integrators/render.hpp"
#include "neb/io/image.hpp"
#include "neb/scene/loader.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <string>

namespace neb::cli {

namespace {

struct Options {
  std::string scene;
  std::string integrator = "neb";
  int iterations = 0;
  double time = 0.0;
  int width = 0;
  int height = 0;
  std::uint64_t seed = 1;
  int threads = 0;
  int max_depth = 10;
  double radius_scale = 2e-3;
  int octree_capacity = DensityOctree::kDefaultCapacity;
  long long n_lp = 0;
  std::string out = "out.pfm";
  std::string reference;
  std::string png;
};

void add_common(CLI::App& app, Options& o) {
  app.add_option("--scene", o.scene, "Scene file or builtin:<name>")->required();
  app.add_option("--iterations", o.iterations, "Number of iterations (samples per pixel)")
      ->check(CLI::PositiveNumber);
  app.add_option("--time", o.time, "Time budget in seconds")->check(CLI::PositiveNumber);
  app.add_option("--width", o.width, "Image width override")->check(CLI::PositiveNumber);
  app.add_option("--height", o.height, "Image height override")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--threads", o.threads, "Worker threads (default: NEB_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-depth", o.max_depth, "Maximum path segments")->check(CLI::Range(1, 15));
  app.add_option("--radius-scale", o.radius_scale, "Merge radius relative to the scene diagonal")
      ->check(CLI::PositiveNumber);
  app.add_option("--octree-capacity", o.octree_capacity, "Density octree slots")->check(CLI::Range(9, 1 << 30));
  app.add_option("--n-lp", o.n_lp, "Light photons per iteration for neb_lp (default: one per pixel)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--reference", o.reference, "Reference PFM for RMSE");
}

RenderConfig make_config(const Options& o, IntegratorKind kind) {
  RenderConfig c;
  c.integrator = kind;
  c.width = o.width;
  c.height = o.height;
  c.iterations = o.iterations;
  c.time_budget = o.time;
  c.seed = o.seed;
  c.threads = o.threads > 0 ? o.threads : default_thread_count();
  c.max_depth = o.max_depth;
  c.radius_scale = o.radius_scale;
  c.octree_capacity = o.octree_capacity;
  c.n_lp = o.n_lp;
  return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physically based renderer with next event backtracking"};
  Options render_opts;
  add_common(app, render_opts);
  app.add_option("--integrator", render_opts.integrator, "pt, neb or neb_lp");
  app.add_option("--out", render_opts.out, "Output PFM path");
  app.add_option("--png", render_opts.png, "Also write a tone-mapped PNG");

  Options compare_opts;
  CLI::App* compare = app.add_subcommand("compare", "Equal-time comparison of pt, neb and neb_lp (CSV)");
  add_common(*compare, compare_opts);
  compare->get_option("--reference")->required();
  compare->get_option("--time")->required();
  // --scene is checked by hand so that `compare` does not need it twice.
  app.require_subcommand(0, 1);
  app.get_option("--scene")->required(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (compare->parsed()) {
      const Scene scene = resolve_scene(compare_opts.scene);
      const Image reference = read_pfm(compare_opts.reference);
      out << "integrator,spp,seconds,rmse\n";
      for (IntegratorKind kind : {IntegratorKind::pt, IntegratorKind::neb, IntegratorKind::neb_lp}) {
        RenderStats stats;
        const Image img = render(scene, make_config(compare_opts, kind), &stats).image();
        out << to_string(kind) << ',' << stats.iterations << ',' << stats.seconds << ',' << rmse(img, reference)
            << '\n';
      }
      return kOk;
    }

    if (render_opts.scene.empty()) {
      err << "--scene is required\n" << app.help();
      return kUsageError;
    }
    if ((render_opts.iterations > 0) == (render_opts.time > 0.0)) {
      err << "exactly one of --iterations and --time must be given\n";
      return kUsageError;
    }
    IntegratorKind kind;
    try {
      kind = parse_integrator(render_opts.integrator);
    } catch (const std::invalid_argument& e) {
      err << e.what() << '\n';
      return kUsageError;
    }
    const Scene scene = resolve_scene(render_opts.scene);
    const RenderConfig config = make_config(render_opts, kind);
    RenderStats stats;
    const Image image = render(scene, config, &stats).image();
    write_pfm(image, render_opts.out);
    if (!render_opts.png.empty()) write_tonemapped_png(image, render_opts.png);
    out << "iterations=" << stats.iterations << " seconds=" << stats.seconds
        << " iterations_per_sec=" << (stats.seconds > 0 ? stats.iterations / stats.seconds : 0.0) << '\n';
    if (!render_opts.reference.empty()) {
      const Image reference = read_pfm(render_opts.reference);
      out << "rmse=" << rmse(image, reference) << '\n';
    }
    return kOk;
  } catch (const SceneError& e) {
    err << "scene error: " << e.what() << '\n';
    return kSceneError;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kCapacityError;
  } catch (const ImageError& e) {
    err << "image error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace neb::cli
