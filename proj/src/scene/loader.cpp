#include "neb/scene/loader.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace neb {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '{' || c == '}') {
      tokens.push_back({std::string(1, c), line});
      ++i;
    } else {
      const std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' &&
             text[i] != '}' && text[i] != '#') {
        ++i;
      }
      tokens.push_back({std::string(text.substr(start, i - start)), line});
    }
  }
  return tokens;
}

class Parser {
 public:
  Parser(std::string_view text, std::filesystem::path base_dir, std::string source)
      : tokens_(tokenize(text)), base_dir_(std::move(base_dir)), source_(std::move(source)) {}

  Scene parse() {
    bool have_camera = false;
    while (pos_ < tokens_.size()) {
      const Token& head = next();
      if (head.text == "camera") {
        if (have_camera) fail(head, "duplicate camera block");
        have_camera = true;
        parse_camera();
      } else if (head.text == "material") {
        parse_material(head);
      } else if (head.text == "sphere") {
        parse_sphere(head);
      } else if (head.text == "quad") {
        parse_quad(head);
      } else if (head.text == "mesh") {
        parse_mesh(head);
      } else if (head.text == "point_light") {
        parse_point_light(head);
      } else if (head.text == "area_light") {
        parse_area_light(head);
      } else {
        fail(head, "unknown block '" + head.text + "'");
      }
    }
    if (!have_camera) throw SceneError(source_ + ": missing camera block");
    try {
      scene_.finalize();
    } catch (const SceneError& e) {
      throw SceneError(source_ + ": " + e.what());
    }
    return std::move(scene_);
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    throw SceneError(source_ + ":" + std::to_string(t.line) + ": " + message);
  }

  const Token& next() {
    if (pos_ >= tokens_.size()) {
      const int line = tokens_.empty() ? 1 : tokens_.back().line;
      throw SceneError(source_ + ":" + std::to_string(line) + ": unexpected end of input");
    }
    return tokens_[pos_++];
  }

  void expect_open() {
    const Token& t = next();
    if (t.text != "{") fail(t, "expected '{', found '" + t.text + "'");
  }

  double number() {
    const Token& t = next();
    double v = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(t, "expected a number, found '" + t.text + "'");
    return v;
  }

  Vector3 vec3() {
    const double x = number();
    const double y = number();
    return {x, y, number()};
  }

  Spectrum spectrum() {
    const Vector3 v = vec3();
    return v.array();
  }

  // Calls `field(key_token)` for every key until the closing brace.
  template <typename Fn>
  void fields(Fn&& field) {
    expect_open();
    for (;;) {
      const Token& key = next();
      if (key.text == "}") return;
      if (key.text == "{") fail(key, "unexpected '{'");
      field(key);
    }
  }

  int material_ref() {
    const Token& t = next();
    const auto it = material_ids_.find(t.text);
    if (it == material_ids_.end()) fail(t, "unknown material '" + t.text + "'");
    return it->second;
  }

  void parse_camera() {
    PinholeCamera& cam = scene_.camera;
    fields([&](const Token& key) {
      if (key.text == "position") cam.position = vec3();
      else if (key.text == "look_at") cam.look_at = vec3();
      else if (key.text == "up") cam.up = vec3();
      else if (key.text == "fov") {
        cam.vertical_fov = number();
        if (!(cam.vertical_fov > 0.0 && cam.vertical_fov < 180.0)) fail(key, "camera: fov must be in (0, 180)");
      } else if (key.text == "resolution") {
        const double w = number();
        const double h = number();
        if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h)) {
          fail(key, "camera: resolution must be positive integers");
        }
        cam.width = static_cast<int>(w);
        cam.height = static_cast<int>(h);
      } else fail(key, "camera: unknown field '" + key.text + "'");
    });
    if ((scene_.camera.look_at - scene_.camera.position).norm() <= 0.0) {
      throw SceneError(source_ + ": camera: look_at coincides with position");
    }
  }

  void parse_material(const Token& head) {
    const Token& name = next();
    if (name.text == "{" || name.text == "}") fail(name, "material: missing name");
    if (material_ids_.count(name.text)) fail(name, "material '" + name.text + "' redefined");
    std::string type = "lambert";
    Spectrum albedo = Spectrum::Constant(0.8);
    Spectrum reflectance = Spectrum::Ones();
    double ior = 1.5;
    double roughness = 0.1;
    double exponent = 20.0;
    fields([&](const Token& key) {
      if (key.text == "type") type = next().text;
      else if (key.text == "albedo") albedo = spectrum();
      else if (key.text == "reflectance") reflectance = spectrum();
      else if (key.text == "ior") ior = number();
      else if (key.text == "roughness") roughness = number();
      else if (key.text == "exponent") exponent = number();
      else fail(key, "material: unknown field '" + key.text + "'");
    });
    const std::string what = "material '" + name.text + "': ";
    if ((albedo < 0.0).any() || (albedo > 1.0).any()) fail(head, what + "albedo must be in [0, 1]");
    if ((reflectance < 0.0).any() || (reflectance > 1.0).any()) fail(head, what + "reflectance must be in [0, 1]");
    if (!(ior > 0.0)) fail(head, what + "ior must be positive");
    Bsdf bsdf;
    if (type == "lambert") bsdf.model = Lambert{albedo};
    else if (type == "mirror") bsdf.model = Mirror{reflectance};
    else if (type == "dielectric") bsdf.model = Dielectric{ior};
    else if (type == "rough_dielectric") {
      if (!(roughness > 0.0 && roughness <= 1.0)) fail(head, what + "roughness must be in (0, 1]");
      bsdf.model = RoughDielectric{ior, roughness};
    } else if (type == "glossy") {
      if (!(exponent >= 0.0)) fail(head, what + "exponent must be nonnegative");
      bsdf.model = GlossyPhong{albedo, exponent};
    } else fail(head, what + "unknown type '" + type + "'");
    material_ids_[name.text] = scene_.add_material(name.text, bsdf);
  }

  void parse_sphere(const Token& head) {
    Sphere s;
    bool have_material = false;
    fields([&](const Token& key) {
      if (key.text == "center") s.center = vec3();
      else if (key.text == "radius") s.radius = number();
      else if (key.text == "material") {
        s.material = material_ref();
        have_material = true;
      } else fail(key, "sphere: unknown field '" + key.text + "'");
    });
    if (!(s.radius > 0.0)) fail(head, "sphere: radius must be positive");
    if (!have_material) fail(head, "sphere: missing material");
    scene_.spheres.push_back(s);
  }

  void parse_quad(const Token& head) {
    Vector3 corner = Vector3::Zero(), e1 = Vector3::Zero(), e2 = Vector3::Zero();
    int material = -1;
    fields([&](const Token& key) {
      if (key.text == "corner") corner = vec3();
      else if (key.text == "edge1") e1 = vec3();
      else if (key.text == "edge2") e2 = vec3();
      else if (key.text == "material") material = material_ref();
      else fail(key, "quad: unknown field '" + key.text + "'");
    });
    if (material < 0) fail(head, "quad: missing material");
    if (!(e1.cross(e2).norm() > 0.0)) fail(head, "quad: zero area");
    scene_.add_quad(corner, e1, e2, material);
  }

  void parse_mesh(const Token& head) {
    const Token& path_token = next();
    if (path_token.text == "{") fail(path_token, "mesh: missing path");
    int material = -1;
    Vector3 translate = Vector3::Zero();
    double scale = 1.0;
    fields([&](const Token& key) {
      if (key.text == "material") material = material_ref();
      else if (key.text == "translate") translate = vec3();
      else if (key.text == "scale") scale = number();
      else fail(key, "mesh: unknown field '" + key.text + "'");
    });
    if (material < 0) fail(head, "mesh: missing material");
    const std::filesystem::path path = base_dir_ / path_token.text;
    std::ifstream in(path);
    if (!in) fail(path_token, "mesh: cannot open '" + path.string() + "'");
    std::vector<Vector3> vertices;
    std::string line;
    int line_no = 0;
    const auto mesh_fail = [&](const std::string& message) {
      throw SceneError(path.string() + ":" + std::to_string(line_no) + ": " + message);
    };
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ls(line);
      std::string kind;
      if (!(ls >> kind) || kind[0] == '#') continue;
      if (kind == "v") {
        Vector3 v;
        if (!(ls >> v.x() >> v.y() >> v.z())) mesh_fail("malformed vertex");
        vertices.push_back(v * scale + translate);
      } else if (kind == "f") {
        long i, j, k;
        if (!(ls >> i >> j >> k)) mesh_fail("malformed face");
        const long n = static_cast<long>(vertices.size());
        if (i < 1 || j < 1 || k < 1 || i > n || j > n || k > n) mesh_fail("face index out of range");
        Triangle t{{vertices[i - 1], vertices[j - 1], vertices[k - 1]}, std::nullopt, material, -1};
        if (!(t.area() > 0.0)) mesh_fail("degenerate face");
        scene_.triangles.push_back(t);
      } else {
        mesh_fail("unknown record '" + kind + "'");
      }
    }
  }

  void parse_point_light(const Token& head) {
    PointLight l;
    fields([&](const Token& key) {
      if (key.text == "position") l.position = vec3();
      else if (key.text == "intensity") l.intensity = spectrum();
      else fail(key, "point_light: unknown field '" + key.text + "'");
    });
    if ((l.intensity < 0.0).any()) fail(head, "point_light: negative intensity");
    scene_.lights.push_back(l);
  }

  void parse_area_light(const Token& head) {
    AreaLight l;
    fields([&](const Token& key) {
      if (key.text == "corner") l.corner = vec3();
      else if (key.text == "edge1") l.edge1 = vec3();
      else if (key.text == "edge2") l.edge2 = vec3();
      else if (key.text == "radiance") l.radiance = spectrum();
      else fail(key, "area_light: unknown field '" + key.text + "'");
    });
    if ((l.radiance < 0.0).any()) fail(head, "area_light: negative radiance");
    if (!(l.area() > 0.0)) fail(head, "area_light: zero area");
    scene_.add_area_light(l);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::filesystem::path base_dir_;
  std::string source_;
  Scene scene_;
  std::map<std::string, int> material_ids_;
};

}  // namespace

Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir, const std::string& source) {
  return Parser(text, base_dir, source).parse();
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError(path.string() + ": cannot open scene file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), path.parent_path(), path.string());
}

Scene resolve_scene(const std::string& spec) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) return load_builtin_scene(spec.substr(prefix.size()));
  return load_scene(spec);
}

}  // namespace neb
