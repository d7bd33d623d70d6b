#include "cornerscat/scene.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cornerscat/errors.hpp"

namespace cornerscat {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, d);
  if (r.ec != std::errc() || r.ptr != end) throw DomainError("scene: " + key + " expects a number, got '" + v + "'");
  return d;
}

int parse_int(const std::string& key, const std::string& v) {
  int i = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, i);
  if (r.ec != std::errc() || r.ptr != end) throw DomainError("scene: " + key + " expects an integer, got '" + v + "'");
  return i;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split(v, ' ')) out.push_back(parse_double(key, tok));
  return out;
}

cplx parse_complex(const std::string& key, const std::string& v) {
  const auto n = parse_numbers(key, v);
  if (n.size() == 1) return n[0];
  if (n.size() == 2) return {n[0], n[1]};
  throw DomainError("scene: " + key + " expects 're' or 're im'");
}

Point2 parse_point(const std::string& key, const std::string& v) {
  const auto n = parse_numbers(key, v);
  if (n.size() != 2) throw DomainError("scene: " + key + " expects two numbers");
  return {n[0], n[1]};
}

const std::set<std::string> kKnown = {
    "shape",          "shapes",          "square.side",  "disk.radius", "triangle.circumradius", "polygon.vertices",
    "sector.omega",   "sector.radius",   "q0",           "profile",     "profile.order",         "profile.scale",
    "N",              "L",               "k",            "k_min",       "k_max",                 "steps",
    "incident",       "direction",       "source",       "density",     "density.samples",       "samples",
    "far_field_out",  "sweep_out",       "field_out",    "square.center", "disk.center",         "sector.apex"};

}  // namespace

Scene parse_scene(std::istream& in, bool degrees) {
  Scene s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("scene line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!kKnown.count(key)) throw DomainError("scene line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (val.empty()) throw DomainError("scene line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    if (s.entries.count(key)) throw DomainError("scene: duplicate key '" + key + "'");
    s.entries[key] = val;
  }
  const auto& e = s.entries;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = e.find(key);
    if (it == e.end()) return std::nullopt;
    return it->second;
  };
  auto num = [&](const std::string& key, double fallback) {
    const auto v = get(key);
    return v ? parse_double(key, *v) : fallback;
  };
  const double angle_scale = degrees ? std::numbers::pi / 180.0 : 1.0;

  std::vector<std::string> names;
  if (get("shape") && get("shapes")) throw DomainError("scene: give either shape or shapes");
  if (const auto v = get("shape")) names = {*v};
  if (const auto v = get("shapes")) names = split(*v, ',');
  if (names.empty()) throw DomainError("scene: missing shape");
  for (const auto& name : names) {
    if (name == "square") {
      const Point2 c = get("square.center") ? parse_point("square.center", *get("square.center")) : Point2{0.0, 0.0};
      s.shapes.push_back(make_square(num("square.side", 1.0), c));
    } else if (name == "disk") {
      const Point2 c = get("disk.center") ? parse_point("disk.center", *get("disk.center")) : Point2{0.0, 0.0};
      s.shapes.push_back(make_disk(num("disk.radius", 0.5), c));
    } else if (name == "triangle") {
      s.shapes.push_back(make_triangle(num("triangle.circumradius", 0.5)));
    } else if (name == "polygon") {
      const auto v = get("polygon.vertices");
      if (!v) throw DomainError("scene: polygon needs polygon.vertices");
      std::vector<Point2> pts;
      for (const auto& p : split(*v, ';')) pts.push_back(parse_point("polygon.vertices", p));
      s.shapes.push_back(make_polygon(pts));
    } else if (name == "sector") {
      const auto w = get("sector.omega");
      if (!w) throw DomainError("scene: sector needs sector.omega");
      const Point2 a = get("sector.apex") ? parse_point("sector.apex", *get("sector.apex")) : Point2{0.0, 0.0};
      s.shapes.push_back(make_sector_patch(parse_double("sector.omega", *w) * angle_scale, num("sector.radius", 0.5), a));
    } else if (name == "none") {
      Shape empty;
      empty.name = "none";
      s.shapes.push_back(empty);
    } else {
      throw DomainError("scene: unknown shape '" + name + "'");
    }
  }

  if (const auto v = get("q0")) s.profile.q0 = parse_complex("q0", *v);
  if (s.profile.q0.imag() < 0.0) throw DomainError("scene: q0 must have Im q0 >= 0");
  const std::string profile = get("profile").value_or("constant");
  if (profile == "constant") {
    s.profile.kind = Profile::Kind::Constant;
  } else if (profile == "corner_power") {
    s.profile.kind = Profile::Kind::CornerPower;
    if (const auto v = get("profile.order")) s.profile.order = parse_int("profile.order", *v);
    s.profile.scale = num("profile.scale", 1.0);
    if (s.profile.order < 0 || !(s.profile.scale > 0.0)) throw DomainError("scene: invalid corner_power profile");
    const Shape& first = s.shapes.front();
    if (first.kind == Shape::Kind::SectorPatch) s.profile.apex = first.center;
    else if (first.kind == Shape::Kind::Polygon) s.profile.apex = first.vertices.front();
  } else {
    throw DomainError("scene: unknown profile '" + profile + "'");
  }

  if (const auto v = get("N")) s.N = parse_int("N", *v);
  s.L = num("L", s.L);
  if (s.N < 2) throw DomainError("scene: N must be >= 2");
  if (!(s.L > 0.0)) throw DomainError("scene: L must be positive");
  if (const auto v = get("k")) s.k = parse_double("k", *v);
  if (const auto v = get("k_min")) s.k_min = parse_double("k_min", *v);
  if (const auto v = get("k_max")) s.k_max = parse_double("k_max", *v);
  if (const auto v = get("steps")) s.steps = parse_int("steps", *v);
  if (s.k && !(*s.k > 0.0)) throw DomainError("scene: k must be positive");
  if (s.k_min.has_value() != s.k_max.has_value()) throw DomainError("scene: k_min and k_max go together");
  if (s.k_min && (!(*s.k_min > 0.0) || *s.k_max < *s.k_min)) throw DomainError("scene: need 0 < k_min <= k_max");
  if (s.k_min && s.steps < 1) throw DomainError("scene: sweep needs steps >= 1");

  const std::string incident = get("incident").value_or("plane");
  if (incident == "plane") {
    s.incident = IncidentField::plane(num("direction", 0.0) * angle_scale);
  } else if (incident == "point") {
    const auto v = get("source");
    if (!v) throw DomainError("scene: point incidence needs source");
    s.incident = IncidentField::point(parse_point("source", *v));
  } else if (incident == "herglotz") {
    const cplx g = get("density") ? parse_complex("density", *get("density")) : cplx(1.0);
    const int n = get("density.samples") ? parse_int("density.samples", *get("density.samples")) : 64;
    if (n < 1) throw DomainError("scene: density.samples must be >= 1");
    s.incident = IncidentField::herglotz(std::vector<cplx>(static_cast<size_t>(n), g));
  } else {
    throw DomainError("scene: unknown incident '" + incident + "'");
  }
  if (const auto v = get("samples")) s.samples = parse_int("samples", *v);
  if (s.samples < 64) throw DomainError("scene: samples must be >= 64");
  s.far_field_out = get("far_field_out").value_or("");
  s.sweep_out = get("sweep_out").value_or("");
  s.field_out = get("field_out").value_or("");
  return s;
}

Scene load_scene(const std::filesystem::path& path, bool degrees) {
  std::ifstream in(path);
  if (!in) throw DomainError("scene: cannot open " + path.string());
  return parse_scene(in, degrees);
}

}  // namespace cornerscat
