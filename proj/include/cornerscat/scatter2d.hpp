#pragma once

// 2D penetrable scattering by the Lippmann-Schwinger equation
//   u = u_in + k^2 int Phi(x - y) (q(y) - 1) u(y) dy,   Phi = (i/4) H_0^(1)(k|x|),
// discretized on a uniform cell grid over [-L, L]^2 and solved with GMRES and
// FFT convolution on the doubled grid.

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cornerscat {

using cplx = std::complex<double>;
using Point2 = std::array<double, 2>;

struct Shape {
  enum class Kind { Empty, Disk, Polygon, SectorPatch };
  Kind kind = Kind::Empty;
  std::string name;  // "square", "triangle", "disk", ...
  Point2 center{0.0, 0.0};
  double radius = 0.0;
  double omega = 0.0;               // sector patch opening
  std::vector<Point2> vertices;     // polygon (counter-clockwise), or the patch outline

  bool has_corner() const { return kind == Kind::Polygon || kind == Kind::SectorPatch; }
};

Shape make_square(double side, Point2 center = {0.0, 0.0});
Shape make_disk(double radius, Point2 center = {0.0, 0.0});
Shape make_polygon(std::vector<Point2> vertices, std::string name = "polygon");
/// Equilateral-ish triangle with the given circumradius, centered at the origin.
Shape make_triangle(double circumradius);
/// {0 < theta < omega, r < radius} with the vertex at `apex`; the arc is
/// approximated by 256 chords.
Shape make_sector_patch(double omega, double radius, Point2 apex = {0.0, 0.0});

/// Fraction of the axis-aligned cell [x0,x1]x[y0,y1] covered by the shape.
double cell_fraction(const Shape& s, double x0, double x1, double y0, double y1);

struct Profile {
  enum class Kind { Constant, CornerPower };
  Kind kind = Kind::Constant;
  cplx q0 = 2.0;
  /// CornerPower: q = 1 + (q0 - 1) |x - apex|^order / scale^order.
  int order = 1;
  Point2 apex{0.0, 0.0};
  double scale = 1.0;

  cplx value(const Point2& x) const;
};

struct ContrastField {
  double L = 1.0;
  int N = 0;
  Shape shape;
  Profile profile;
  /// (q - 1) times the covered cell fraction, row-major with index iy * N + ix.
  std::vector<cplx> m;
  /// |q(corner cell) - 1| for corner shapes.
  std::optional<double> corner_contrast;

  double h() const { return 2.0 * L / N; }
  Point2 cell_center(int ix, int iy) const;
  bool is_zero() const;
  bool is_real() const;
};

/// Rasterizes the shape with exact area fractions on boundary cells. Throws
/// DomainError for N < 2, L <= 0, or Im q < 0.
ContrastField make_contrast(const Shape& shape, const Profile& profile, int N, double L);

struct IncidentField {
  enum class Kind { Plane, Point, Herglotz };
  Kind kind = Kind::Plane;
  double direction = 0.0;      // plane: angle of d
  Point2 source{0.0, 0.0};     // point source location
  std::vector<cplx> density;   // herglotz: g at uniform angles 2 pi j / size

  static IncidentField plane(double angle);
  static IncidentField point(Point2 y);
  static IncidentField herglotz(std::vector<cplx> g);
};

/// u_in at the points. Point sources throw DomainError at the source itself.
std::vector<cplx> incident_values(const IncidentField& inc, double k, const std::vector<Point2>& points);
cplx incident_value(const IncidentField& inc, double k, const Point2& x);

struct SolveOptions {
  double tolerance = 1e-11;
  int restart = 60;
  int max_iterations = 3000;
  bool force = false;  // ignore the resolution guard
};

struct TotalField {
  int N = 0;
  double L = 1.0;
  double k = 1.0;
  std::vector<cplx> u;
  double residual = 0.0;  // relative residual of the discrete system
  int iterations = 0;
  std::vector<double> residual_history;
  bool resolution_warning = false;
};

/// Minimum N with N >= 10 (2L) k / (2 pi).
int required_grid_size(double L, double k);

/// Solves the discrete Lippmann-Schwinger system. Throws ResolutionError when
/// the grid is too coarse (unless opts.force), ConvergenceError when GMRES
/// misses the tolerance.
TotalField solve(const ContrastField& c, double k, const IncidentField& inc, const SolveOptions& opts = {});

/// The discrete operator u -> u - k^2 K(m u), for tests.
std::vector<cplx> apply_system(const ContrastField& c, double k, const std::vector<cplx>& u);

struct FarFieldPattern {
  double k = 1.0;
  std::vector<double> angles;
  std::vector<cplx> values;
  double l2_norm = 0.0;  // (int |u_inf|^2 dtheta)^{1/2}, trapezoid
};

/// u_inf(xhat) = e^{i pi/4} / sqrt(8 pi k) k^2 sum_j h^2 e^{-i k xhat.x_j} m_j u_j
/// at M >= 64 uniform angles.
FarFieldPattern far_field(const ContrastField& c, const TotalField& total, int M = 256);
cplx far_field_at(const ContrastField& c, const TotalField& total, double angle);

double l2_norm(const std::vector<cplx>& values);  // trapezoid on uniform angles
double l2_distance(const FarFieldPattern& a, const FarFieldPattern& b);

struct DiskOracle {
  double radius = 0.0;
  cplx q0 = 2.0;
  double k = 1.0;
  double direction = 0.0;
  int n_max = 0;
  std::vector<cplx> a;  // scattered Hankel coefficients, index n + n_max
  std::vector<cplx> b;  // interior Bessel coefficients
  FarFieldPattern far;

  cplx scattered_coefficient(int n) const { return a[static_cast<size_t>(n + n_max)]; }
  /// Total field at a point (interior or exterior series).
  cplx total(const Point2& x) const;
};

/// Mode matching of u+ = u-, d_nu u+ = d_nu u- on |x| = radius for a plane wave
/// of angle `direction`. Throws ConvergenceError on a near-singular mode.
DiskOracle disk_oracle(double radius, cplx q0, double k, double direction, int M = 256);

/// The same for the Herglotz field with constant density g (i.e. 2 pi g J_0(k r)).
DiskOracle disk_oracle_bessel(double radius, cplx q0, double k, cplx g, int M = 256);

/// k J0(k1 R) J1(k R) - k1 J1(k1 R) J0(k R), k1 = k sqrt(q0).
double disk_transmission_determinant(double radius, double q0, double k);

/// Root of disk_transmission_determinant in [k_lo, k_hi] (sign change required).
double disk_transmission_eigenvalue(double radius, double q0, double k_lo, double k_hi);

/// |Re(e^{i pi/4} u_inf(d)) + sqrt(k / (8 pi)) |u_inf|^2| / (sqrt(k/(8 pi)) |u_inf|^2).
double optical_theorem_residual(const FarFieldPattern& pattern, cplx forward);

/// |u_inf(-d; x) - u_inf(-x; d)| / max of both, for plane incidence angles a, b.
double reciprocity_mismatch(const ContrastField& c, double k, double angle_a, double angle_b,
                            const SolveOptions& opts = {});

/// Absolute far-field L2 error of the solver on a reference disk
/// (radius 0.8 L, q0 = 2) against the oracle, at the grid of `like`.
double calibrated_floor(const ContrastField& like, double k, const SolveOptions& opts = {});

struct SweepEntry {
  double k = 0.0;
  double norm = 0.0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  double residual = 0.0;
  double floor = 0.0;
  bool flagged = false;
  bool failed = false;
  std::string message;
};

/// Far-field norms on steps uniformly spaced k in [k_min, k_max]. An entry is
/// flagged when its norm is below 10 x the calibrated floor. Solver errors mark
/// the entry failed and the sweep continues.
std::vector<SweepEntry> sweep(const ContrastField& c, const IncidentField& inc, double k_min, double k_max, int steps,
                              const SolveOptions& opts = {});

struct BoundarySample {
  Point2 x;
  Point2 normal;  // unit, pointing into the outer side
};

/// max over samples of |d_nu^j (u_outer - u_inner)| for j = 0..max_order by
/// one-sided sixth-order differences with step h (outer samples at x + s h nu,
/// inner at x - s h nu). Throws DomainError for max_order > 6.
std::vector<double> transmission_residual(const std::function<cplx(const Point2&)>& u_outer,
                                          const std::function<cplx(const Point2&)>& u_inner,
                                          const std::vector<BoundarySample>& arc, int max_order, double h = 1e-2);

/// One-sided finite-difference weights for the j-th derivative at 0 from nodes 0..n-1.
std::vector<double> one_sided_weights(int derivative, int points);

void write_far_field_csv(std::ostream& os, const FarFieldPattern& p);
/// Little-endian: "CSF1", u32 nx, u32 ny, f64 xmin, xmax, ymin, ymax, k, then
/// nx*ny (re, im) f64 pairs row-major in y.
void write_field_binary(std::ostream& os, const TotalField& t);

}  // namespace cornerscat
