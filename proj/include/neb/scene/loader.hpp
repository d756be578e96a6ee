#pragma once

#include "neb/scene/scene.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace neb {

// Scene description format
// ------------------------
// Whitespace separated tokens, '#' starts a comment. Top-level blocks:
//
//   camera { position X Y Z  look_at X Y Z  up X Y Z  fov DEG  resolution W H }
//   material NAME { type lambert|mirror|dielectric|rough_dielectric|glossy
//                   albedo R G B  reflectance R G B  ior N  roughness A  exponent E }
//   sphere { center X Y Z  radius R  material NAME }
//   quad { corner X Y Z  edge1 X Y Z  edge2 X Y Z  material NAME }
//   mesh PATH { material NAME  translate X Y Z  scale S }
//   point_light { position X Y Z  intensity R G B }
//   area_light { corner X Y Z  edge1 X Y Z  edge2 X Y Z  radiance R G B }
//
// Lengths are meters, angles degrees. Quads and area lights face along
// edge1 x edge2. A mesh PATH is relative to the scene file and holds lines
// "v X Y Z" and "f I J K" (1-based indices). Materials must be declared
// before use; exactly one camera block is required.

/// Throws SceneError with "source:line: message" on syntax errors and
/// validation failures.
Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir = {},
                  const std::string& source = "<scene>");

Scene load_scene(const std::filesystem::path& path);

/// Procedural test scenes: cornell_diffuse, caustic_sphere, light_bulb, mirror_box.
std::vector<std::string> builtin_scene_names();
std::string builtin_scene_source(const std::string& name);
Scene load_builtin_scene(const std::string& name);

/// "builtin:NAME" or a file path.
Scene resolve_scene(const std::string& spec);

}  // namespace neb
