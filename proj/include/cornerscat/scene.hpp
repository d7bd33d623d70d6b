#pragma once

// Plain-text scene description, one `key = value` per line, `#` comments.
//
//   shape = square              # square | disk | triangle | polygon | sector | none
//   shapes = square, disk       # several scatterers solved side by side
//   square.side = 1             # per-shape parameters are prefixed by the shape name
//   disk.radius = 0.5
//   triangle.circumradius = 0.5
//   polygon.vertices = 0 0; 1 0; 0 1
//   sector.omega = 1.5708
//   sector.radius = 0.5
//   q0 = 2                      # or "re im" for complex q0
//   profile = constant          # constant | corner_power
//   profile.order = 1
//   profile.scale = 1
//   N = 256
//   L = 0.6
//   k = 3                       # single solve
//   k_min = 1                   # sweep
//   k_max = 10
//   steps = 50
//   incident = plane            # plane | point | herglotz
//   direction = 0
//   source = 2 0
//   density = 1                 # constant herglotz density ("re im" allowed)
//   density.samples = 64
//   samples = 256               # far-field angles
//   far_field_out = far.csv
//   sweep_out = sweep.csv
//   field_out = field.bin

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cornerscat/scatter2d.hpp"

namespace cornerscat {

struct Scene {
  std::vector<Shape> shapes;
  Profile profile;
  int N = 128;
  double L = 0.6;
  std::optional<double> k;
  std::optional<double> k_min;
  std::optional<double> k_max;
  int steps = 0;
  IncidentField incident = IncidentField::plane(0.0);
  int samples = 256;
  std::string far_field_out;
  std::string sweep_out;
  std::string field_out;
  std::map<std::string, std::string> entries;  // every parsed key
};

/// Parses a scene. Angles (direction, sector.omega) are converted from degrees
/// when `degrees` is set. Throws DomainError on unknown keys or malformed values.
Scene parse_scene(std::istream& in, bool degrees = false);
Scene load_scene(const std::filesystem::path& path, bool degrees = false);

}  // namespace cornerscat
