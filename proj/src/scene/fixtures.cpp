#include "neb/scene/loader.hpp"

#include <map>

namespace neb {

namespace {

constexpr const char* kCornellDiffuse = R"(# Closed-material box, all diffuse, one area light under the ceiling.
camera {
  position 0 1 3.6
  look_at 0 1 0
  up 0 1 0
  fov 38
  resolution 64 64
}

material white { type lambert albedo 0.7 0.7 0.7 }
material red   { type lambert albedo 0.63 0.065 0.05 }
material green { type lambert albedo 0.14 0.45 0.091 }

quad { corner -1 0 -1  edge1 2 0 0  edge2 0 0 2  material white }   # floor
quad { corner -1 2 -1  edge1 2 0 0  edge2 0 0 2  material white }   # ceiling
quad { corner -1 0 -1  edge1 2 0 0  edge2 0 2 0  material white }   # back
quad { corner -1 0 -1  edge1 0 0 2  edge2 0 2 0  material red }     # left
quad { corner 1 0 -1   edge1 0 0 2  edge2 0 2 0  material green }   # right

sphere { center -0.35 0.45 -0.3  radius 0.45  material white }

area_light {
  corner -0.5 1.98 -0.5
  edge1 1 0 0
  edge2 0 0 1
  radiance 4 4 4
}
)";

constexpr const char* kCausticSphere = R"(# Rough glass ball on a diffuse floor, lit by a small light from the side.
camera {
  position 0 2.2 3.2
  look_at 0.2 0.3 0
  up 0 1 0
  fov 40
  resolution 64 64
}

material floor { type lambert albedo 0.8 0.8 0.8 }
material glass { type rough_dielectric ior 1.5 roughness 0.05 }

quad { corner -2.5 0 -2  edge1 5 0 0  edge2 0 0 4.5  material floor }
quad { corner -2.5 0 -2  edge1 5 0 0  edge2 0 3 0    material floor }

sphere { center 0 0.6 0  radius 0.5  material glass }

area_light {
  corner -2.075 2 -0.075
  edge1 0.15 0 0
  edge2 0 0 0.15
  radiance 200 200 200
}
)";

constexpr const char* kLightBulb = R"(# Small emitter enclosed by a frosted glass shell inside a room.
camera {
  position 0 1.2 3.4
  look_at 0 1.0 0
  up 0 1 0
  fov 45
  resolution 64 64
}

material white { type lambert albedo 0.7 0.7 0.7 }
material blue  { type lambert albedo 0.2 0.3 0.6 }
material shell { type rough_dielectric ior 1.5 roughness 0.3 }

quad { corner -1.5 0 -1.5  edge1 3 0 0  edge2 0 0 4  material white }   # floor
quad { corner -1.5 2.5 -1.5  edge1 3 0 0  edge2 0 0 4  material white } # ceiling
quad { corner -1.5 0 -1.5  edge1 3 0 0  edge2 0 2.5 0  material white } # back
quad { corner -1.5 0 -1.5  edge1 0 0 4  edge2 0 2.5 0  material blue }  # left
quad { corner 1.5 0 -1.5   edge1 0 0 4  edge2 0 2.5 0  material white } # right

sphere { center 0.6 0.35 -0.6  radius 0.35  material white }
sphere { center 0 1.3 -0.3  radius 0.3  material shell }

area_light {
  corner -0.05 1.3 -0.35
  edge1 0.1 0 0
  edge2 0 0 0.1
  radiance 300 300 300
}
)";

constexpr const char* kMirrorBox = R"(# Box with a mirror wall and a mirror ball.
camera {
  position 0 1 3.6
  look_at 0 1 0
  up 0 1 0
  fov 38
  resolution 64 64
}

material white  { type lambert albedo 0.7 0.7 0.7 }
material green  { type lambert albedo 0.14 0.45 0.091 }
material mirror { type mirror reflectance 0.95 0.95 0.95 }
material glossy { type glossy albedo 0.6 0.5 0.3 exponent 60 }

quad { corner -1 0 -1  edge1 2 0 0  edge2 0 0 2  material white }
quad { corner -1 2 -1  edge1 2 0 0  edge2 0 0 2  material white }
quad { corner -1 0 -1  edge1 2 0 0  edge2 0 2 0  material white }
quad { corner -1 0 -1  edge1 0 0 2  edge2 0 2 0  material mirror }
quad { corner 1 0 -1   edge1 0 0 2  edge2 0 2 0  material green }

sphere { center 0.4 0.4 -0.2  radius 0.4  material mirror }
sphere { center -0.45 0.3 0.2  radius 0.3  material glossy }

area_light {
  corner -0.3 1.98 -0.3
  edge1 0.6 0 0
  edge2 0 0 0.6
  radiance 8 8 8
}
)";

const std::map<std::string, const char*>& builtins() {
  static const std::map<std::string, const char*> table = {
      {"cornell_diffuse", kCornellDiffuse},
      {"caustic_sphere", kCausticSphere},
      {"light_bulb", kLightBulb},
      {"mirror_box", kMirrorBox},
  };
  return table;
}

}  // namespace

std::vector<std::string> builtin_scene_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : builtins()) names.push_back(name);
  return names;
}

std::string builtin_scene_source(const std::string& name) {
  const auto it = builtins().find(name);
  if (it == builtins().end()) throw SceneError("unknown builtin scene '" + name + "'");
  return it->second;
}

Scene load_builtin_scene(const std::string& name) {
  return parse_scene(builtin_scene_source(name), {}, "builtin:" + name);
}

}  // namespace neb
