#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cornerscat/cone_spectrum.hpp"
#include "cornerscat/errors.hpp"
#include "cornerscat/helmholtz_series.hpp"
#include "cornerscat/poly_cauchy.hpp"
#include "cornerscat/scatter2d.hpp"
#include "cornerscat/scene.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cornerscat;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSchema = "cornerscat/1";

enum Exit { kOk = 0, kInput = 2, kCertification = 3, kNumeric = 4, kGuard = 5 };

struct Common {
  bool json_out = false;
  std::string workdir = ".";
  bool degrees = false;
  bool force = false;
  std::string manifest = "manifest.json";
};

struct Run {
  std::string subcommand;
  json parameters = json::object();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
};

std::uint64_t fnv1a(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

fs::path resolve(const Common& c, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : fs::path(c.workdir) / path;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw DomainError("cannot write " + p.string());
  return os;
}

void write_manifest(const Common& c, const Run& run, double seconds, int code) {
  json m;
  m["schema"] = kSchema;
  m["tool_version"] = kVersion;
  m["subcommand"] = run.subcommand;
  m["parameters"] = run.parameters;
  m["exit_code"] = code;
  m["inputs"] = json::array();
  for (const auto& p : run.inputs) m["inputs"].push_back({{"path", p.string()}, {"fnv1a64", hex(fnv1a(p))}});
  m["outputs"] = json::array();
  for (const auto& p : run.outputs) m["outputs"].push_back({{"path", p.string()}, {"fnv1a64", hex(fnv1a(p))}});
  m["timing_seconds"] = seconds;
  auto os = open_out(resolve(c, c.manifest));
  os << m.dump(2) << "\n";
}

// Angles: plain number, or "pi", "pi/3", "2pi/3", "2*pi/3". Returns radians and
// the exact pi fraction when given symbolically.
struct Angle {
  double radians = 0.0;
  std::optional<PiFraction> exact;
};

Angle parse_angle(const std::string& s, bool degrees) {
  static const std::regex re(R"(^\s*(\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, re)) {
    const long num = m[1].length() ? std::stol(m[1]) : 1;
    const long den = m[2].length() ? std::stol(m[2]) : 1;
    if (den <= 0) throw DomainError("angle '" + s + "': zero denominator");
    return {std::numbers::pi * static_cast<double>(num) / static_cast<double>(den), PiFraction{num, den}};
  }
  double v = 0.0;
  try {
    size_t used = 0;
    v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw DomainError("cannot parse angle '" + s + "'");
  }
  if (degrees) {
    const double q = v / 180.0;
    for (long den = 1; den <= 12; ++den) {
      const double num = q * static_cast<double>(den);
      if (std::abs(num - std::round(num)) < 1e-12) return {v * std::numbers::pi / 180.0, PiFraction{std::lround(num), den}};
    }
    return {v * std::numbers::pi / 180.0, std::nullopt};
  }
  return {v, std::nullopt};
}

SectorGeometry sector_of(const Angle& a) {
  return a.exact ? SectorGeometry::from_pi_fraction(a.exact->num, a.exact->den) : SectorGeometry::from_radians(a.radians);
}

ConeGeometry cone_of(const Angle& a) {
  return a.exact ? ConeGeometry::from_pi_fraction(a.exact->num, a.exact->den) : ConeGeometry::from_radians(a.radians);
}

void emit(const Common& c, const json& j, const std::string& text) {
  if (c.json_out) {
    json out = j;
    out["schema"] = kSchema;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

// ------------------------------------------------------------ spectrum

struct SpectrumArgs {
  std::string geometry = "sector";
  std::string omega;
  std::string bc = "dirichlet";
  double lambda_max = 10.0;
  int order = -1;
  std::string out;
};

int cmd_spectrum(const Common& c, const SpectrumArgs& a, Run& run) {
  run.parameters = {{"geometry", a.geometry}, {"omega", a.omega}, {"bc", a.bc}, {"lambda_max", a.lambda_max},
                    {"order", a.order},       {"out", a.out}};
  const Angle w = parse_angle(a.omega, c.degrees);
  const BoundaryCondition bc = parse_boundary_condition(a.bc);
  std::vector<SingularExponent> exps;
  if (a.geometry == "sector") {
    const auto g = sector_of(w);
    if (g.is_excluded()) throw DomainError("excluded angle: sector opening omega = pi is a flat boundary");
    exps = sector_exponents(g, bc, a.lambda_max);
  } else if (a.geometry == "cone") {
    const auto g = cone_of(w);
    try {
      exps = cone_exponents(g, bc, a.lambda_max, a.order >= 0 ? std::optional<int>(a.order) : std::nullopt);
    } catch (const ConvergenceError& e) {
      throw CertificationError(std::string("root finder: ") + e.what());
    }
  } else {
    throw DomainError("unknown geometry '" + a.geometry + "' (sector | cone)");
  }
  std::ostringstream csv;
  write_exponent_csv(csv, exps);
  if (!a.out.empty()) {
    const auto p = resolve(c, a.out);
    open_out(p) << csv.str();
    run.outputs.push_back(p);
  }
  json j{{"subcommand", "spectrum"}, {"geometry", a.geometry}, {"omega", w.radians}, {"bc", to_string(bc)}};
  j["exponents"] = json::array();
  for (const auto& e : exps)
    j["exponents"].push_back(
        {{"lambda", e.value}, {"index", e.index}, {"multiplicity", e.multiplicity}, {"residual", e.residual}, {"orders", e.orders}});
  emit(c, j, csv.str());
  return kOk;
}

// ------------------------------------------------------------ cauchy-null

struct NullArgs {
  std::string geometry = "sector";
  std::string omega;
  int min_degree = 2;
  int max_degree = 8;
  int precision_bits = 200;
  bool force_interval = false;
  std::string out;
};

int cmd_cauchy_null(const Common& c, const NullArgs& a, Run& run) {
  run.parameters = {{"geometry", a.geometry},     {"omega", a.omega},
                    {"min_degree", a.min_degree}, {"max_degree", a.max_degree},
                    {"precision_bits", a.precision_bits}, {"force_interval", a.force_interval},
                    {"out", a.out}};
  if (a.min_degree < 2 || a.max_degree < a.min_degree) throw DomainError("need 2 <= min-degree <= max-degree");
  if (a.precision_bits < 2) throw DomainError("precision-bits must be >= 2");
  const Angle w = parse_angle(a.omega, c.degrees);
  NullspaceOptions opts;
  opts.precision_bits = a.precision_bits;
  opts.force_interval = a.force_interval;
  json j{{"subcommand", "cauchy-null"}, {"geometry", a.geometry}, {"omega", w.radians}, {"degrees", json::array()}};
  std::ostringstream text;
  text << "degree,dimension,method,rank,columns,certified,precision_bits\n";
  for (int d = a.min_degree; d <= a.max_degree; ++d) {
    NullspaceReport r;
    if (a.geometry == "sector") r = cauchy_nullspace(sector_of(w), d, opts);
    else if (a.geometry == "cone") r = cauchy_nullspace(cone_of(w), d, opts);
    else throw DomainError("unknown geometry '" + a.geometry + "' (sector | cone)");
    j["degrees"].push_back(to_json(r));
    text << d << "," << r.basis.size() << "," << r.method << "," << r.rank << "," << r.columns << ","
         << (r.certified ? "yes" : "no") << "," << r.precision_bits << "\n";
  }
  if (!a.out.empty()) {
    const auto p = resolve(c, a.out);
    json file = j;
    file["schema"] = kSchema;
    open_out(p) << file.dump(2) << "\n";
    run.outputs.push_back(p);
  }
  emit(c, j, text.str());
  return kOk;
}

// ------------------------------------------------------------ scatter / sweep

fs::path with_suffix(const fs::path& p, const std::string& name, bool many) {
  if (!many) return p;
  return p.parent_path() / (p.stem().string() + "_" + name + p.extension().string());
}

void guard(const Scene& s, double k, bool force) {
  const int need = required_grid_size(s.L, k);
  if (s.N < need && !force)
    throw ResolutionError("grid N=" + std::to_string(s.N) + " under-resolves k=" + std::to_string(k) + " (need N >= " +
                          std::to_string(need) + "; pass --force to override)");
}

int cmd_scatter(const Common& c, const std::string& scene_path, Run& run) {
  const auto sp = resolve(c, scene_path);
  if (!fs::exists(sp)) throw DomainError("scene file not found: " + sp.string());
  run.inputs.push_back(sp);
  const Scene s = load_scene(sp, c.degrees);
  run.parameters = {{"scene", scene_path}, {"entries", s.entries}};
  if (!s.k) throw DomainError("scatter: scene needs k");
  guard(s, *s.k, c.force);
  SolveOptions opts;
  opts.force = c.force;
  const bool many = s.shapes.size() > 1;
  json j{{"subcommand", "scatter"}, {"k", *s.k}, {"results", json::array()}};
  std::ostringstream text;
  for (const auto& shape : s.shapes) {
    const auto contrast = make_contrast(shape, s.profile, s.N, s.L);
    const auto total = solve(contrast, *s.k, s.incident, opts);
    const auto pattern = far_field(contrast, total, s.samples);
    json r{{"shape", shape.name}, {"far_field_norm", pattern.l2_norm}, {"residual", total.residual},
           {"iterations", total.iterations}, {"resolution_warning", total.resolution_warning}};
    if (contrast.is_real() && s.incident.kind == IncidentField::Kind::Plane && !contrast.is_zero())
      r["optical_theorem_residual"] = optical_theorem_residual(pattern, far_field_at(contrast, total, s.incident.direction));
    if (contrast.corner_contrast) r["corner_contrast"] = *contrast.corner_contrast;
    if (!s.far_field_out.empty()) {
      const auto p = with_suffix(resolve(c, s.far_field_out), shape.name, many);
      auto os = open_out(p);
      write_far_field_csv(os, pattern);
      run.outputs.push_back(p);
    }
    if (!s.field_out.empty()) {
      const auto p = with_suffix(resolve(c, s.field_out), shape.name, many);
      auto os = open_out(p);
      write_field_binary(os, total);
      run.outputs.push_back(p);
    }
    text << shape.name << ": |u_inf| = " << pattern.l2_norm << ", residual = " << total.residual
         << ", iterations = " << total.iterations << "\n";
    j["results"].push_back(r);
  }
  emit(c, j, text.str());
  return kOk;
}

int cmd_sweep(const Common& c, const std::string& scene_path, Run& run) {
  const auto sp = resolve(c, scene_path);
  if (!fs::exists(sp)) throw DomainError("scene file not found: " + sp.string());
  run.inputs.push_back(sp);
  const Scene s = load_scene(sp, c.degrees);
  run.parameters = {{"scene", scene_path}, {"entries", s.entries}};
  if (!s.k_min) throw DomainError("sweep: scene needs k_min, k_max and steps");
  guard(s, *s.k_max, c.force);
  SolveOptions opts;
  opts.force = c.force;
  std::vector<std::vector<SweepEntry>> tables;
  for (const auto& shape : s.shapes) {
    const auto contrast = make_contrast(shape, s.profile, s.N, s.L);
    tables.push_back(sweep(contrast, s.incident, *s.k_min, *s.k_max, s.steps, opts));
  }
  std::ostringstream csv;
  csv << "k";
  for (const auto& shape : s.shapes)
    csv << "," << shape.name << "_norm," << shape.name << "_min," << shape.name << "_max," << shape.name << "_floor,"
        << shape.name << "_flag";
  csv << "\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return std::string(buf);
  };
  bool failed = false;
  json j{{"subcommand", "sweep"}, {"shapes", json::array()}};
  for (size_t i = 0; i < s.shapes.size(); ++i) {
    json rows = json::array();
    for (const auto& e : tables[i]) {
      failed = failed || e.failed;
      rows.push_back({{"k", e.k}, {"norm", e.norm}, {"min", e.min_abs}, {"max", e.max_abs}, {"residual", e.residual},
                      {"floor", e.floor}, {"flagged", e.flagged}, {"failed", e.failed}, {"message", e.message}});
    }
    j["shapes"].push_back({{"shape", s.shapes[i].name}, {"entries", rows}});
  }
  for (size_t r = 0; r < static_cast<size_t>(s.steps); ++r) {
    csv << fmt(tables[0][r].k);
    for (const auto& t : tables) {
      const auto& e = t[r];
      csv << "," << fmt(e.norm) << "," << fmt(e.min_abs) << "," << fmt(e.max_abs) << "," << fmt(e.floor) << ","
          << (e.failed ? "failed" : (e.flagged ? "1" : "0"));
    }
    csv << "\n";
  }
  if (!s.sweep_out.empty()) {
    const auto p = resolve(c, s.sweep_out);
    open_out(p) << csv.str();
    run.outputs.push_back(p);
  }
  emit(c, j, csv.str());
  if (failed) {
    std::cerr << "sweep: some wavenumbers failed (see the failed column)\n";
    return kNumeric;
  }
  return kOk;
}

// ------------------------------------------------------------ expand

int cmd_expand(const Common& c, const std::string& seeds_path, const std::string& out, Run& run) {
  const auto sp = resolve(c, seeds_path);
  std::ifstream in(sp);
  if (!in) throw DomainError("seeds file not found: " + sp.string());
  run.inputs.push_back(sp);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(std::string("seeds file: ") + e.what());
  }
  run.parameters = {{"seeds", seeds_path}, {"out", out}, {"config", cfg}};
  json result;
  std::ostringstream text;
  try {
    const int dim = cfg.value("dimension", 2);
    const double k = cfg.at("k").get<double>();
    const int J = cfg.at("J").get<int>();
    if (!(k > 0.0) || J < 0) throw DomainError("expand: need k > 0 and J >= 0");
    const double scale = c.degrees ? std::numbers::pi / 180.0 : 1.0;
    const std::vector<double> radii = cfg.value("radii", std::vector<double>{0.05, 0.1, 0.2});
    json residuals = json::array();
    json lowest = json::array();
    if (dim == 2) {
      Seeds2D seeds;
      if (cfg.contains("plane_wave")) {
        seeds = plane_wave_seeds_2d(k, cfg["plane_wave"].value("theta", 0.0) * scale, J);
      } else {
        for (const auto& s : cfg.at("seeds")) {
          const std::string sign = s.value("sign", "plus");
          if (sign != "plus" && sign != "minus") throw DomainError("expand: sign must be plus or minus");
          seeds[{s.at("n").get<int>(), sign == "plus" ? Sign::Plus : Sign::Minus}] = {s.value("re", 0.0), s.value("im", 0.0)};
        }
      }
      const auto e = expand_2d(seeds, k, J);
      result["expansion"] = to_json(e);
      for (double r : radii) {
        std::vector<std::array<double, 2>> pts;
        for (int i = 0; i < 16; ++i) pts.push_back({r, 2.0 * std::numbers::pi * i / 16});
        residuals.push_back({{"r", r}, {"residual", helmholtz_residual(e, pts, k)}});
      }
      for (const auto& p : lowest_taylor_terms(e, 2)) lowest.push_back({{"term", to_json(p)}, {"harmonic", p.laplacian().is_zero()}});
    } else if (dim == 3) {
      Seeds3D seeds;
      if (cfg.contains("plane_wave")) {
        seeds = plane_wave_seeds_3d(k, cfg["plane_wave"].value("theta", 0.0) * scale, cfg["plane_wave"].value("phi", 0.0) * scale, J);
      } else {
        for (const auto& s : cfg.at("seeds"))
          seeds[{s.at("n").get<int>(), s.value("m", 0)}] = {s.value("re", 0.0), s.value("im", 0.0)};
      }
      const auto e = expand_3d(seeds, k, J);
      result["expansion"] = to_json(e);
      for (double r : radii) {
        std::vector<std::array<double, 3>> pts;
        for (int i = 0; i < 4; ++i)
          for (int jj = 0; jj < 4; ++jj) pts.push_back({r, std::numbers::pi * (i + 0.5) / 4, 2.0 * std::numbers::pi * jj / 4});
        residuals.push_back({{"r", r}, {"residual", helmholtz_residual(e, pts, k)}});
      }
      for (const auto& p : lowest_taylor_terms(e, 2)) lowest.push_back({{"term", to_json(p)}, {"harmonic", p.laplacian().is_zero()}});
    } else {
      throw DomainError("expand: dimension must be 2 or 3");
    }
    result["residuals"] = residuals;
    result["lowest_terms"] = lowest;
  } catch (const json::exception& e) {
    throw DomainError(std::string("seeds file: ") + e.what());
  }
  result["subcommand"] = "expand";
  for (const auto& r : result["residuals"]) text << "r = " << r["r"] << ": residual " << r["residual"] << "\n";
  for (const auto& t : result["lowest_terms"]) text << "lowest term degree " << t["term"]["degree"] << " harmonic: " << t["harmonic"] << "\n";
  if (!out.empty()) {
    const auto p = resolve(c, out);
    json file = result;
    file["schema"] = kSchema;
    open_out(p) << file.dump(2) << "\n";
    run.outputs.push_back(p);
  }
  emit(c, result, text.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corner scattering toolkit: singular exponents, polynomial Cauchy null spaces, Helmholtz expansions, 2D scattering"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--json", common.json_out, "Machine-readable output on stdout");
  app.add_option("--workdir", common.workdir, "Base directory for relative paths");
  app.add_flag("--degrees", common.degrees, "Read angles in degrees");
  app.add_flag("--force", common.force, "Run even when the grid under-resolves the wavelength");
  app.add_option("--manifest", common.manifest, "Manifest path (relative to the workdir)");

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "Singular exponents of a sector or cone");
  spectrum->add_option("--geometry", sa.geometry, "sector | cone");
  spectrum->add_option("--omega", sa.omega, "Opening (sector) or half-angle (cone); accepts pi/3 style")->required();
  spectrum->add_option("--bc", sa.bc, "dirichlet | neumann");
  spectrum->add_option("--lambda-max", sa.lambda_max, "Upper bound of the exponent window");
  spectrum->add_option("--order", sa.order, "Restrict a cone scan to one angular order |m|");
  spectrum->add_option("--out", sa.out, "CSV output path");

  NullArgs na;
  auto* cauchy = app.add_subcommand("cauchy-null", "Polynomial biharmonic Cauchy null spaces");
  cauchy->add_option("--geometry", na.geometry, "sector | cone");
  cauchy->add_option("--omega", na.omega, "Opening (sector) or half-angle (cone); accepts pi/3 style")->required();
  cauchy->add_option("--min-degree", na.min_degree, "Lowest degree (>= 2)");
  cauchy->add_option("--max-degree", na.max_degree, "Highest degree");
  cauchy->add_option("--precision-bits", na.precision_bits, "Interval precision");
  cauchy->add_flag("--force-interval", na.force_interval, "Use interval certification even for exact angles");
  cauchy->add_option("--out", na.out, "JSON report path");

  std::string scene_path;
  auto* scatter = app.add_subcommand("scatter", "Solve one scene at a fixed wavenumber");
  scatter->add_option("scene", scene_path, "Scene file")->required();
  std::string sweep_scene;
  auto* sweep_cmd = app.add_subcommand("sweep", "Far-field norms over a wavenumber range");
  sweep_cmd->add_option("scene", sweep_scene, "Scene file")->required();

  std::string seeds_path, expand_out;
  auto* expand = app.add_subcommand("expand", "Helmholtz local expansion from seeds");
  expand->add_option("seeds", seeds_path, "Seeds JSON file")->required();
  expand->add_option("--out", expand_out, "JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  Run run;
  const auto t0 = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    if (*spectrum) {
      run.subcommand = "spectrum";
      code = cmd_spectrum(common, sa, run);
    } else if (*cauchy) {
      run.subcommand = "cauchy-null";
      code = cmd_cauchy_null(common, na, run);
    } else if (*scatter) {
      run.subcommand = "scatter";
      code = cmd_scatter(common, scene_path, run);
    } else if (*sweep_cmd) {
      run.subcommand = "sweep";
      code = cmd_sweep(common, sweep_scene, run);
    } else if (*expand) {
      run.subcommand = "expand";
      code = cmd_expand(common, seeds_path, expand_out, run);
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kInput;
  } catch (const CertificationError& e) {
    std::cerr << "certification failed: " << e.what() << "\n";
    code = kCertification;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution guard: " << e.what() << "\n";
    code = kGuard;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    code = kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    code = kNumeric;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_manifest(common, run, seconds, code);
  } catch (const std::exception& e) {
    std::cerr << "manifest: " << e.what() << "\n";
    if (code == kOk) code = kInput;
  }
  return code;
}
