#include <doctest.h>

#include <numbers>
#include <sstream>

#include "cornerscat/errors.hpp"
#include "cornerscat/scene.hpp"

using namespace cornerscat;

namespace {
Scene parse(const std::string& text, bool degrees = false) {
  std::istringstream in(text);
  return parse_scene(in, degrees);
}
}  // namespace

TEST_CASE("parse a full scene") {
  const auto s = parse(R"(# comment
shapes = square, disk   # trailing comment
square.side = 0.8
disk.radius = 0.3
disk.center = 0.1 -0.2
q0 = 2.5 0.1
N = 96
L = 0.7
k_min = 1
k_max = 4
steps = 7
incident = herglotz
density = 0.5
density.samples = 32
samples = 128
sweep_out = out.csv
)");
  REQUIRE(s.shapes.size() == 2);
  CHECK(s.shapes[0].name == "square");
  CHECK(s.shapes[1].kind == Shape::Kind::Disk);
  CHECK(s.shapes[1].center == Point2{0.1, -0.2});
  CHECK(s.profile.q0 == cplx(2.5, 0.1));
  CHECK(s.N == 96);
  CHECK(s.L == 0.7);
  CHECK(*s.k_min == 1.0);
  CHECK(s.steps == 7);
  CHECK(s.incident.kind == IncidentField::Kind::Herglotz);
  CHECK(s.incident.density.size() == 32);
  CHECK(s.samples == 128);
  CHECK(s.sweep_out == "out.csv");
  CHECK_FALSE(s.k.has_value());
  CHECK(s.entries.size() == 15);
}

TEST_CASE("defaults, degrees and shapes") {
  const auto s = parse("shape = sector\nsector.omega = 90\nk = 3\ndirection = 180\n", true);
  CHECK(s.shapes[0].kind == Shape::Kind::SectorPatch);
  CHECK(s.shapes[0].omega == doctest::Approx(std::numbers::pi / 2));
  CHECK(s.incident.kind == IncidentField::Kind::Plane);
  CHECK(s.incident.direction == doctest::Approx(std::numbers::pi));
  CHECK(s.N == 128);
  CHECK(s.L == 0.6);
  CHECK(s.profile.q0 == cplx(2.0));
  const auto p = parse("shape = polygon\npolygon.vertices = 0 0; 0.3 0; 0 0.3\nk = 1\n");
  CHECK(p.shapes[0].vertices.size() == 3);
  const auto none = parse("shape = none\nk = 1\n");
  CHECK(none.shapes[0].kind == Shape::Kind::Empty);
  const auto cp = parse("shape = triangle\nprofile = corner_power\nprofile.order = 2\nk = 2\n");
  CHECK(cp.profile.kind == Profile::Kind::CornerPower);
  CHECK(cp.profile.apex == cp.shapes[0].vertices.front());
  const auto pt = parse("shape = disk\nincident = point\nsource = 2 0\nk = 1\n");
  CHECK(pt.incident.source == Point2{2.0, 0.0});
}

TEST_CASE("malformed scenes raise DomainError") {
  const char* bad[] = {
      "",
      "k = 1\n",
      "shape = circle\n",
      "shape = disk\nradius = 1\n",
      "shape = disk\nk = 1\nk = 2\n",
      "shape = disk\nk\n",
      "shape = disk\nk =\n",
      "shape = disk\nk = abc\n",
      "shape = disk\nk = -1\n",
      "shape = disk\nN = 1\n",
      "shape = disk\nN = 12.5\n",
      "shape = disk\nL = 0\n",
      "shape = disk\nq0 = 2 -1\n",
      "shape = disk\nq0 = 1 2 3\n",
      "shape = disk\nk_min = 1\n",
      "shape = disk\nk_min = 3\nk_max = 2\nsteps = 4\n",
      "shape = disk\nk_min = 1\nk_max = 2\nsteps = 0\n",
      "shape = disk\nincident = spherical\n",
      "shape = disk\nincident = point\n",
      "shape = disk\nsamples = 10\n",
      "shape = disk\nprofile = gaussian\n",
      "shape = polygon\n",
      "shape = sector\n",
      "shape = disk\nshapes = square\n",
      "shape = disk\ndisk.center = 1\n",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse(text), DomainError);
  }
  CHECK_THROWS_AS(load_scene("/nonexistent/scene.txt"), DomainError);
}
