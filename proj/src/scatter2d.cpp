#include "cornerscat/scatter2d.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>
#include <fftw3.h>

#include "cornerscat/errors.hpp"
#include "cornerscat/specfun.hpp"

namespace cornerscat {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
const cplx kI(0.0, 1.0);

// ------------------------------------------------------------ geometry

double polygon_area(const std::vector<Point2>& p) {
  double a = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    a += u[0] * v[1] - v[0] * u[1];
  }
  return 0.5 * a;
}

// Sutherland-Hodgman against one half-plane: keep points with sign * (coord - bound) <= 0.
std::vector<Point2> clip_half(const std::vector<Point2>& poly, int axis, double bound, double sign) {
  std::vector<Point2> out;
  if (poly.empty()) return out;
  auto inside = [&](const Point2& p) { return sign * (p[static_cast<size_t>(axis)] - bound) <= 0.0; };
  auto cross = [&](const Point2& a, const Point2& b) {
    const double t = (bound - a[static_cast<size_t>(axis)]) / (b[static_cast<size_t>(axis)] - a[static_cast<size_t>(axis)]);
    Point2 r{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    r[static_cast<size_t>(axis)] = bound;
    return r;
  };
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point2& cur = poly[i];
    const Point2& prev = poly[(i + poly.size() - 1) % poly.size()];
    const bool ci = inside(cur), pi = inside(prev);
    if (ci) {
      if (!pi) out.push_back(cross(prev, cur));
      out.push_back(cur);
    } else if (pi) {
      out.push_back(cross(prev, cur));
    }
  }
  return out;
}

double polygon_rect_area(const std::vector<Point2>& poly, double x0, double x1, double y0, double y1) {
  auto p = clip_half(poly, 0, x1, 1.0);
  p = clip_half(p, 0, x0, -1.0);
  p = clip_half(p, 1, y1, 1.0);
  p = clip_half(p, 1, y0, -1.0);
  return p.size() < 3 ? 0.0 : std::abs(polygon_area(p));
}

// Area of {x <= X, y <= Y} inside the disk of radius R at the origin.
double disk_corner_area(double R, double X, double Y) {
  auto F = [R](double x) {
    x = std::clamp(x, -R, R);
    return 0.5 * (x * std::sqrt(std::max(R * R - x * x, 0.0)) + R * R * std::asin(x / R));
  };
  auto S = [&](double x) { return F(x) - F(-R); };
  const double Xc = std::clamp(X, -R, R);
  if (Y >= R) return 2.0 * S(Xc);
  if (Y <= -R || X <= -R) return 0.0;
  const double a = std::sqrt(R * R - Y * Y);
  double area = 0.0;
  if (Y >= 0.0) area += 2.0 * S(std::min(Xc, -a));
  if (Xc > -a) {
    const double hi = std::min(Xc, a);
    area += Y * (hi + a) + S(hi) - S(-a);
  }
  if (Y >= 0.0 && Xc > a) area += 2.0 * (S(Xc) - S(a));
  return area;
}

// ------------------------------------------------------------ kernel

double y0_quarter(double k, double r) { return -specfun::bessel_y(0, k * r) / 4.0; }

// 8-point Gauss-Legendre on [a, b] x [c, d].
template <typename F>
double gauss_square(F f, double a, double b, double c, double d) {
  static const specfun::QuadratureRule rule = specfun::gauss_legendre(8);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = 0.5 * (b - a) * rule.nodes[i] + 0.5 * (a + b);
    for (size_t j = 0; j < rule.nodes.size(); ++j) {
      const double y = 0.5 * (d - c) * rule.nodes[j] + 0.5 * (c + d);
      s += rule.weights[i] * rule.weights[j] * f(x, y);
    }
  }
  return s * 0.25 * (b - a) * (d - c);
}

// int over the centered cell of -Y0(k|y|)/4.
double self_cell_real(double k, double h) {
  const double b = 0.5 * h;
  const double log_int = 4.0 * b * b * (std::log(b) + 0.5 * std::log(2.0) - 1.5 + kPi / 4.0);
  // -Y0(kr)/4 = -(1/2pi) ln(r) J0(kr) + R(r), R smooth; ln r (J0 - 1) is continuous.
  auto smooth = [k](double x, double y) {
    const double r = std::hypot(x, y);
    const double j0 = specfun::bessel_j(0, k * r);
    const double rest = y0_quarter(k, r) + std::log(r) * j0 / (2.0 * kPi);
    return rest - std::log(r) * (j0 - 1.0) / (2.0 * kPi);
  };
  double s = 0.0;
  s += gauss_square(smooth, -b, 0.0, -b, 0.0);
  s += gauss_square(smooth, 0.0, b, -b, 0.0);
  s += gauss_square(smooth, -b, 0.0, 0.0, b);
  s += gauss_square(smooth, 0.0, b, 0.0, b);
  return s - log_int / (2.0 * kPi);
}

// Kernel G(p, q) including cell weight h^2 (no k^2).
cplx kernel_entry(double k, double h, int p, int q) {
  const double r = h * std::hypot(static_cast<double>(p), static_cast<double>(q));
  const double im = h * h * specfun::bessel_j(0, k * r) / 4.0;
  double re;
  if (p == 0 && q == 0) {
    re = self_cell_real(k, h);
  } else if (std::max(std::abs(p), std::abs(q)) <= 3) {
    const double cx = p * h, cy = q * h;
    re = gauss_square([&](double x, double y) { return y0_quarter(k, std::hypot(x, y)); }, cx - 0.5 * h, cx + 0.5 * h,
                      cy - 0.5 * h, cy + 0.5 * h);
  } else {
    re = h * h * y0_quarter(k, r);
  }
  return {re, im};
}

class Convolver {
 public:
  Convolver(const ContrastField& c, double k) : n_(c.N), m_(2 * c.N) {
    const size_t total = static_cast<size_t>(m_) * static_cast<size_t>(m_);
    kernel_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    work_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    forward_ = fftw_plan_dft_2d(m_, m_, work_, work_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(m_, m_, work_, work_, FFTW_BACKWARD, FFTW_ESTIMATE);
    const double h = c.h();
    std::vector<cplx> g(static_cast<size_t>(n_) * static_cast<size_t>(n_));
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q <= p; ++q) {
        const cplx v = kernel_entry(k, h, p, q);
        g[static_cast<size_t>(p) * static_cast<size_t>(n_) + static_cast<size_t>(q)] = v;
        g[static_cast<size_t>(q) * static_cast<size_t>(n_) + static_cast<size_t>(p)] = v;
      }
    std::memset(work_, 0, sizeof(fftw_complex) * total);
    for (int p = -(n_ - 1); p <= n_ - 1; ++p)
      for (int q = -(n_ - 1); q <= n_ - 1; ++q) {
        const cplx v = g[static_cast<size_t>(std::abs(p)) * static_cast<size_t>(n_) + static_cast<size_t>(std::abs(q))];
        const size_t idx = static_cast<size_t>((q + m_) % m_) * static_cast<size_t>(m_) + static_cast<size_t>((p + m_) % m_);
        work_[idx][0] = v.real();
        work_[idx][1] = v.imag();
      }
    fftw_execute(forward_);
    std::memcpy(kernel_, work_, sizeof(fftw_complex) * total);
  }
  ~Convolver() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(kernel_);
    fftw_free(work_);
  }
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  // out = G * f on the N x N grid (f indexed iy * N + ix).
  void apply(const std::vector<cplx>& f, std::vector<cplx>& out) {
    const size_t total = static_cast<size_t>(m_) * static_cast<size_t>(m_);
    std::memset(work_, 0, sizeof(fftw_complex) * total);
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix) {
        const cplx v = f[static_cast<size_t>(iy) * static_cast<size_t>(n_) + static_cast<size_t>(ix)];
        const size_t idx = static_cast<size_t>(iy) * static_cast<size_t>(m_) + static_cast<size_t>(ix);
        work_[idx][0] = v.real();
        work_[idx][1] = v.imag();
      }
    fftw_execute(forward_);
    for (size_t i = 0; i < total; ++i) {
      const double a = work_[i][0], b = work_[i][1], c = kernel_[i][0], d = kernel_[i][1];
      work_[i][0] = a * c - b * d;
      work_[i][1] = a * d + b * c;
    }
    fftw_execute(backward_);
    const double scale = 1.0 / static_cast<double>(total);
    out.resize(f.size());
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix) {
        const size_t idx = static_cast<size_t>(iy) * static_cast<size_t>(m_) + static_cast<size_t>(ix);
        out[static_cast<size_t>(iy) * static_cast<size_t>(n_) + static_cast<size_t>(ix)] =
            cplx(work_[idx][0], work_[idx][1]) * scale;
      }
  }

 private:
  int n_;
  int m_;
  fftw_complex* kernel_ = nullptr;
  fftw_complex* work_ = nullptr;
  fftw_plan forward_;
  fftw_plan backward_;
};

double norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

struct GmresResult {
  int iterations = 0;
  std::vector<double> history;
  bool converged = false;
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations; x holds the initial guess.
template <typename Op>
GmresResult gmres(Op op, const std::vector<cplx>& b, std::vector<cplx>& x, double tol, int restart, int max_iter) {
  GmresResult res;
  const size_t n = b.size();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx(0.0));
    res.converged = true;
    return res;
  }
  std::vector<cplx> ax(n), w(n);
  while (res.iterations < max_iter) {
    op(x, ax);
    std::vector<cplx> r(n);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    double beta = norm2(r);
    res.history.push_back(beta / bnorm);
    if (beta / bnorm <= tol) {
      res.converged = true;
      return res;
    }
    const int m = restart;
    std::vector<std::vector<cplx>> v;
    v.reserve(static_cast<size_t>(m + 1));
    for (auto& z : r) z /= beta;
    v.push_back(std::move(r));
    std::vector<std::vector<cplx>> hmat(static_cast<size_t>(m + 1), std::vector<cplx>(static_cast<size_t>(m), 0.0));
    std::vector<cplx> cs(static_cast<size_t>(m)), sn(static_cast<size_t>(m)), g(static_cast<size_t>(m + 1), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < m && res.iterations < max_iter; ++j) {
      ++res.iterations;
      op(v[static_cast<size_t>(j)], w);
      for (int i = 0; i <= j; ++i) {
        cplx hij = 0.0;
        const auto& vi = v[static_cast<size_t>(i)];
        for (size_t t = 0; t < n; ++t) hij += std::conj(vi[t]) * w[t];
        for (size_t t = 0; t < n; ++t) w[t] -= hij * vi[t];
        hmat[static_cast<size_t>(i)][static_cast<size_t>(j)] = hij;
      }
      const double hn = norm2(w);
      hmat[static_cast<size_t>(j + 1)][static_cast<size_t>(j)] = hn;
      for (int i = 0; i < j; ++i) {
        const cplx a = hmat[static_cast<size_t>(i)][static_cast<size_t>(j)];
        const cplx bb = hmat[static_cast<size_t>(i + 1)][static_cast<size_t>(j)];
        hmat[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::conj(cs[static_cast<size_t>(i)]) * a + std::conj(sn[static_cast<size_t>(i)]) * bb;
        hmat[static_cast<size_t>(i + 1)][static_cast<size_t>(j)] = -sn[static_cast<size_t>(i)] * a + cs[static_cast<size_t>(i)] * bb;
      }
      const cplx a = hmat[static_cast<size_t>(j)][static_cast<size_t>(j)];
      const cplx bb = hmat[static_cast<size_t>(j + 1)][static_cast<size_t>(j)];
      const double den = std::sqrt(std::norm(a) + std::norm(bb));
      cs[static_cast<size_t>(j)] = den == 0.0 ? 1.0 : a / den;
      sn[static_cast<size_t>(j)] = den == 0.0 ? 0.0 : bb / den;
      hmat[static_cast<size_t>(j)][static_cast<size_t>(j)] = den;
      hmat[static_cast<size_t>(j + 1)][static_cast<size_t>(j)] = 0.0;
      g[static_cast<size_t>(j + 1)] = -sn[static_cast<size_t>(j)] * g[static_cast<size_t>(j)];
      g[static_cast<size_t>(j)] = std::conj(cs[static_cast<size_t>(j)]) * g[static_cast<size_t>(j)];
      const double est = std::abs(g[static_cast<size_t>(j + 1)]) / bnorm;
      res.history.push_back(est);
      if (est <= tol || hn == 0.0) {
        ++j;
        break;
      }
      std::vector<cplx> next(w);
      for (auto& z : next) z /= hn;
      v.push_back(std::move(next));
    }
    // back substitution
    std::vector<cplx> y(static_cast<size_t>(j));
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[static_cast<size_t>(i)];
      for (int t = i + 1; t < j; ++t) s -= hmat[static_cast<size_t>(i)][static_cast<size_t>(t)] * y[static_cast<size_t>(t)];
      y[static_cast<size_t>(i)] = s / hmat[static_cast<size_t>(i)][static_cast<size_t>(i)];
    }
    for (int i = 0; i < j; ++i)
      for (size_t t = 0; t < n; ++t) x[t] += y[static_cast<size_t>(i)] * v[static_cast<size_t>(i)][t];
  }
  op(x, ax);
  std::vector<cplx> r(n);
  for (size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
  res.history.push_back(norm2(r) / bnorm);
  res.converged = res.history.back() <= tol;
  return res;
}

std::vector<double> uniform_angles(int M) {
  std::vector<double> a(static_cast<size_t>(M));
  for (int j = 0; j < M; ++j) a[static_cast<size_t>(j)] = 2.0 * kPi * j / M;
  return a;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

}  // namespace

// ------------------------------------------------------------ shapes

Shape make_square(double side, Point2 center) {
  if (!(side > 0.0)) throw DomainError("square side must be positive");
  const double a = 0.5 * side;
  Shape s = make_polygon({{center[0] - a, center[1] - a}, {center[0] + a, center[1] - a}, {center[0] + a, center[1] + a},
                          {center[0] - a, center[1] + a}},
                         "square");
  return s;
}

Shape make_disk(double radius, Point2 center) {
  if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
  Shape s;
  s.kind = Shape::Kind::Disk;
  s.name = "disk";
  s.center = center;
  s.radius = radius;
  return s;
}

Shape make_polygon(std::vector<Point2> vertices, std::string name) {
  if (vertices.size() < 3) throw DomainError("polygon needs at least 3 vertices");
  if (polygon_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
  if (polygon_area(vertices) == 0.0) throw DomainError("degenerate polygon");
  Shape s;
  s.kind = Shape::Kind::Polygon;
  s.name = std::move(name);
  s.vertices = std::move(vertices);
  return s;
}

Shape make_triangle(double circumradius) {
  if (!(circumradius > 0.0)) throw DomainError("triangle size must be positive");
  std::vector<Point2> v;
  for (int i = 0; i < 3; ++i) {
    const double t = kPi / 2.0 + 2.0 * kPi * i / 3.0;
    v.push_back({circumradius * std::cos(t), circumradius * std::sin(t)});
  }
  return make_polygon(v, "triangle");
}

Shape make_sector_patch(double omega, double radius, Point2 apex) {
  if (!(omega > 0.0 && omega < 2.0 * kPi)) throw DomainError("sector opening must lie in (0, 2 pi)");
  if (!(radius > 0.0)) throw DomainError("sector radius must be positive");
  std::vector<Point2> v{apex};
  const int chords = 256;
  for (int i = 0; i <= chords; ++i) {
    const double t = omega * i / chords;
    v.push_back({apex[0] + radius * std::cos(t), apex[1] + radius * std::sin(t)});
  }
  Shape s = make_polygon(v, "sector");
  s.kind = Shape::Kind::SectorPatch;
  s.omega = omega;
  s.radius = radius;
  s.center = apex;
  return s;
}

double cell_fraction(const Shape& s, double x0, double x1, double y0, double y1) {
  const double area = (x1 - x0) * (y1 - y0);
  switch (s.kind) {
    case Shape::Kind::Empty:
      return 0.0;
    case Shape::Kind::Disk: {
      const double cx = s.center[0], cy = s.center[1], R = s.radius;
      const double nx = std::clamp(cx, x0, x1) - cx, ny = std::clamp(cy, y0, y1) - cy;
      if (nx * nx + ny * ny >= R * R) return 0.0;
      const double fx = std::max(std::abs(x0 - cx), std::abs(x1 - cx));
      const double fy = std::max(std::abs(y0 - cy), std::abs(y1 - cy));
      if (fx * fx + fy * fy <= R * R) return 1.0;
      const double a = disk_corner_area(R, x1 - cx, y1 - cy) - disk_corner_area(R, x0 - cx, y1 - cy) -
                       disk_corner_area(R, x1 - cx, y0 - cy) + disk_corner_area(R, x0 - cx, y0 - cy);
      return std::clamp(a / area, 0.0, 1.0);
    }
    case Shape::Kind::Polygon:
    case Shape::Kind::SectorPatch: {
      double bx0 = s.vertices[0][0], bx1 = bx0, by0 = s.vertices[0][1], by1 = by0;
      for (const auto& v : s.vertices) {
        bx0 = std::min(bx0, v[0]);
        bx1 = std::max(bx1, v[0]);
        by0 = std::min(by0, v[1]);
        by1 = std::max(by1, v[1]);
      }
      if (x1 <= bx0 || x0 >= bx1 || y1 <= by0 || y0 >= by1) return 0.0;
      return std::clamp(polygon_rect_area(s.vertices, x0, x1, y0, y1) / area, 0.0, 1.0);
    }
  }
  return 0.0;
}

cplx Profile::value(const Point2& x) const {
  if (kind == Kind::Constant) return q0;
  const double r = std::hypot(x[0] - apex[0], x[1] - apex[1]) / scale;
  return 1.0 + (q0 - 1.0) * std::pow(r, order);
}

Point2 ContrastField::cell_center(int ix, int iy) const {
  const double hh = h();
  return {-L + (ix + 0.5) * hh, -L + (iy + 0.5) * hh};
}

bool ContrastField::is_zero() const {
  return std::all_of(m.begin(), m.end(), [](const cplx& z) { return z == cplx(0.0); });
}

bool ContrastField::is_real() const {
  return std::all_of(m.begin(), m.end(), [](const cplx& z) { return z.imag() == 0.0; });
}

ContrastField make_contrast(const Shape& shape, const Profile& profile, int N, double L) {
  if (N < 2) throw DomainError("grid size N must be >= 2");
  if (!(L > 0.0)) throw DomainError("half-width L must be positive");
  ContrastField c;
  c.L = L;
  c.N = N;
  c.shape = shape;
  c.profile = profile;
  c.m.assign(static_cast<size_t>(N) * static_cast<size_t>(N), 0.0);
  const double h = c.h();
  for (int iy = 0; iy < N; ++iy) {
    for (int ix = 0; ix < N; ++ix) {
      const double x0 = -L + ix * h, y0 = -L + iy * h;
      const double f = cell_fraction(shape, x0, x0 + h, y0, y0 + h);
      if (f == 0.0) continue;
      const cplx q = profile.value(c.cell_center(ix, iy));
      if (q.imag() < 0.0) throw DomainError("refractive index must have Im q >= 0");
      c.m[static_cast<size_t>(iy) * static_cast<size_t>(N) + static_cast<size_t>(ix)] = (q - 1.0) * f;
    }
  }
  if (shape.has_corner()) {
    const Point2 v = shape.kind == Shape::Kind::SectorPatch ? shape.center : shape.vertices[0];
    c.corner_contrast = std::abs(profile.value(v) - 1.0);
  }
  return c;
}

// ------------------------------------------------------------ incident fields

IncidentField IncidentField::plane(double angle) {
  IncidentField f;
  f.kind = Kind::Plane;
  f.direction = angle;
  return f;
}

IncidentField IncidentField::point(Point2 y) {
  IncidentField f;
  f.kind = Kind::Point;
  f.source = y;
  return f;
}

IncidentField IncidentField::herglotz(std::vector<cplx> g) {
  if (g.empty()) throw DomainError("herglotz density needs at least one sample");
  IncidentField f;
  f.kind = Kind::Herglotz;
  f.density = std::move(g);
  return f;
}

cplx incident_value(const IncidentField& inc, double k, const Point2& x) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  switch (inc.kind) {
    case IncidentField::Kind::Plane:
      return std::exp(kI * k * (x[0] * std::cos(inc.direction) + x[1] * std::sin(inc.direction)));
    case IncidentField::Kind::Point: {
      const double r = std::hypot(x[0] - inc.source[0], x[1] - inc.source[1]);
      if (r == 0.0) throw DomainError("point source coincides with an evaluation point");
      return 0.25 * kI * specfun::cylinder_hankel0(k * r);
    }
    case IncidentField::Kind::Herglotz: {
      const size_t M = inc.density.size();
      cplx s = 0.0;
      for (size_t j = 0; j < M; ++j) {
        const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(M);
        s += inc.density[j] * std::exp(kI * k * (x[0] * std::cos(t) + x[1] * std::sin(t)));
      }
      return s * (2.0 * kPi / static_cast<double>(M));
    }
  }
  return 0.0;
}

std::vector<cplx> incident_values(const IncidentField& inc, double k, const std::vector<Point2>& points) {
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(incident_value(inc, k, p));
  return out;
}

// ------------------------------------------------------------ solver

int required_grid_size(double L, double k) { return static_cast<int>(std::ceil(10.0 * 2.0 * L * k / (2.0 * kPi))); }

std::vector<cplx> apply_system(const ContrastField& c, double k, const std::vector<cplx>& u) {
  Convolver conv(c, k);
  std::vector<cplx> f(u.size()), out;
  for (size_t i = 0; i < u.size(); ++i) f[i] = c.m[i] * u[i];
  conv.apply(f, out);
  for (size_t i = 0; i < u.size(); ++i) out[i] = u[i] - k * k * out[i];
  return out;
}

TotalField solve(const ContrastField& c, double k, const IncidentField& inc, const SolveOptions& opts) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  TotalField t;
  t.N = c.N;
  t.L = c.L;
  t.k = k;
  const int need = required_grid_size(c.L, k);
  if (c.N < need) {
    if (!opts.force)
      throw ResolutionError("grid N=" + std::to_string(c.N) + " under-resolves k=" + std::to_string(k) +
                            " (need N >= " + std::to_string(need) + ")");
    t.resolution_warning = true;
  }
  const size_t n = c.m.size();
  std::vector<cplx> b(n);
  for (int iy = 0; iy < c.N; ++iy)
    for (int ix = 0; ix < c.N; ++ix)
      b[static_cast<size_t>(iy) * static_cast<size_t>(c.N) + static_cast<size_t>(ix)] = incident_value(inc, k, c.cell_center(ix, iy));
  t.u = b;
  if (c.is_zero()) {
    t.residual = 0.0;
    return t;
  }
  Convolver conv(c, k);
  std::vector<cplx> f(n), g;
  auto op = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
    for (size_t i = 0; i < n; ++i) f[i] = c.m[i] * x[i];
    conv.apply(f, g);
    y.resize(n);
    for (size_t i = 0; i < n; ++i) y[i] = x[i] - k * k * g[i];
  };
  const auto res = gmres(op, b, t.u, opts.tolerance, opts.restart, opts.max_iterations);
  t.iterations = res.iterations;
  t.residual_history = res.history;
  std::vector<cplx> au;
  op(t.u, au);
  std::vector<cplx> r(n);
  for (size_t i = 0; i < n; ++i) r[i] = b[i] - au[i];
  t.residual = norm2(r) / norm2(b);
  if (!res.converged || t.residual > 1e-8) {
    throw ConvergenceError("GMRES stopped at relative residual " + std::to_string(t.residual) + " after " +
                           std::to_string(res.iterations) + " iterations");
  }
  return t;
}

// ------------------------------------------------------------ far field

namespace {

cplx far_field_sum(const ContrastField& c, const TotalField& total, double angle) {
  const double h = c.h();
  const double dx = std::cos(angle), dy = std::sin(angle);
  std::vector<cplx> ex(static_cast<size_t>(c.N)), ey(static_cast<size_t>(c.N));
  for (int i = 0; i < c.N; ++i) {
    const double x = -c.L + (i + 0.5) * h;
    ex[static_cast<size_t>(i)] = std::exp(-kI * total.k * dx * x);
    ey[static_cast<size_t>(i)] = std::exp(-kI * total.k * dy * x);
  }
  cplx s = 0.0;
  for (int iy = 0; iy < c.N; ++iy) {
    cplx row = 0.0;
    for (int ix = 0; ix < c.N; ++ix) {
      const size_t idx = static_cast<size_t>(iy) * static_cast<size_t>(c.N) + static_cast<size_t>(ix);
      if (c.m[idx] == cplx(0.0)) continue;
      row += ex[static_cast<size_t>(ix)] * c.m[idx] * total.u[idx];
    }
    s += ey[static_cast<size_t>(iy)] * row;
  }
  const double k = total.k;
  return std::exp(kI * kPi / 4.0) / std::sqrt(8.0 * kPi * k) * k * k * h * h * s;
}

}  // namespace

cplx far_field_at(const ContrastField& c, const TotalField& total, double angle) {
  if (total.N != c.N || total.L != c.L) throw DomainError("far_field: total field and contrast grids differ");
  return far_field_sum(c, total, angle);
}

FarFieldPattern far_field(const ContrastField& c, const TotalField& total, int M) {
  if (M < 64) throw DomainError("far_field: need at least 64 angles");
  FarFieldPattern p;
  p.k = total.k;
  p.angles = uniform_angles(M);
  for (double a : p.angles) p.values.push_back(far_field_at(c, total, a));
  p.l2_norm = l2_norm(p.values);
  return p;
}

double l2_norm(const std::vector<cplx>& values) {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * 2.0 * kPi / static_cast<double>(values.size()));
}

double l2_distance(const FarFieldPattern& a, const FarFieldPattern& b) {
  if (a.values.size() != b.values.size()) throw DomainError("l2_distance: patterns sampled differently");
  std::vector<cplx> d(a.values.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = a.values[i] - b.values[i];
  return l2_norm(d);
}

// ------------------------------------------------------------ disk oracle

namespace {

DiskOracle disk_modes(double radius, cplx q0, double k, const std::function<cplx(int)>& incident_coef, int M) {
  if (!(radius > 0.0) || !(k > 0.0)) throw DomainError("disk_oracle: radius and k must be positive");
  if (q0.imag() != 0.0 || !(q0.real() > 0.0)) throw DomainError("disk_oracle: q0 must be real and positive");
  if (q0.real() == 1.0) throw DomainError("disk_oracle: q0 must differ from 1");
  if (M < 64) throw DomainError("disk_oracle: need at least 64 angles");
  DiskOracle o;
  o.radius = radius;
  o.q0 = q0;
  o.k = k;
  const double k1 = k * std::sqrt(q0.real());
  o.n_max = static_cast<int>(std::ceil(std::max(k, k1) * radius)) + 25;
  const double x = k * radius, x1 = k1 * radius;
  for (int n = -o.n_max; n <= o.n_max; ++n) {
    const cplx c = incident_coef(n);
    const double J1 = specfun::bessel_j(n, x1), dJ1 = specfun::bessel_j_dx(n, x1);
    const cplx H = specfun::hankel1(n, x), dH = specfun::hankel1_dx(n, x);
    const cplx f = c * specfun::bessel_j(n, x);
    const cplx g = c * k * specfun::bessel_j_dx(n, x);
    const cplx det = -J1 * k * dH + H * k1 * dJ1;
    if (std::abs(det) <= 1e-13 * (std::abs(J1 * k * dH) + std::abs(H * k1 * dJ1)))
      throw ConvergenceError("disk_oracle: near-singular mode n=" + std::to_string(n));
    o.a.push_back((J1 * g - k1 * dJ1 * f) / det);
    o.b.push_back((-k * dH * f + H * g) / det);
  }
  o.far.k = k;
  o.far.angles = uniform_angles(M);
  const cplx pref = std::sqrt(2.0 / (kPi * k)) * std::exp(-kI * kPi / 4.0);
  for (double t : o.far.angles) {
    cplx s = 0.0;
    for (int n = -o.n_max; n <= o.n_max; ++n) s += o.scattered_coefficient(n) * std::pow(-kI, n) * std::exp(kI * (n * t));
    o.far.values.push_back(pref * s);
  }
  o.far.l2_norm = l2_norm(o.far.values);
  return o;
}

}  // namespace

cplx DiskOracle::total(const Point2& x) const {
  const double r = std::hypot(x[0], x[1]), t = std::atan2(x[1], x[0]);
  const double k1 = k * std::sqrt(q0.real());
  cplx s = 0.0;
  if (r < radius) {
    for (int n = -n_max; n <= n_max; ++n) s += b[static_cast<size_t>(n + n_max)] * specfun::bessel_j(n, k1 * r) * std::exp(kI * (n * t));
    return s;
  }
  for (int n = -n_max; n <= n_max; ++n) s += a[static_cast<size_t>(n + n_max)] * specfun::hankel1(n, k * r) * std::exp(kI * (n * t));
  return s + std::exp(kI * k * (x[0] * std::cos(direction) + x[1] * std::sin(direction)));
}

DiskOracle disk_oracle(double radius, cplx q0, double k, double direction, int M) {
  auto coef = [direction](int n) { return std::pow(kI, n) * std::exp(-kI * (n * direction)); };
  DiskOracle o = disk_modes(radius, q0, k, coef, M);
  o.direction = direction;
  return o;
}

DiskOracle disk_oracle_bessel(double radius, cplx q0, double k, cplx g, int M) {
  auto coef = [g](int n) { return n == 0 ? 2.0 * kPi * g : cplx(0.0); };
  return disk_modes(radius, q0, k, coef, M);
}

double disk_transmission_determinant(double radius, double q0, double k) {
  const double k1 = k * std::sqrt(q0);
  return k * specfun::bessel_j(0, k1 * radius) * specfun::bessel_j(1, k * radius) -
         k1 * specfun::bessel_j(1, k1 * radius) * specfun::bessel_j(0, k * radius);
}

double disk_transmission_eigenvalue(double radius, double q0, double k_lo, double k_hi) {
  auto f = [&](double k) { return disk_transmission_determinant(radius, q0, k); };
  if (f(k_lo) * f(k_hi) > 0.0) throw DomainError("disk_transmission_eigenvalue: no sign change on the bracket");
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, k_lo, k_hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

// ------------------------------------------------------------ identities

double optical_theorem_residual(const FarFieldPattern& pattern, cplx forward) {
  const double c = std::sqrt(pattern.k / (8.0 * kPi)) * pattern.l2_norm * pattern.l2_norm;
  if (c == 0.0) return std::abs(forward);
  return std::abs((std::exp(kI * kPi / 4.0) * forward).real() + c) / c;
}

double reciprocity_mismatch(const ContrastField& c, double k, double angle_a, double angle_b, const SolveOptions& opts) {
  const auto ta = solve(c, k, IncidentField::plane(angle_a), opts);
  const auto tb = solve(c, k, IncidentField::plane(angle_b), opts);
  // u_inf(xhat = -b; d = a) versus u_inf(xhat = -a; d = b)
  const cplx x = far_field_at(c, ta, angle_b + kPi);
  const cplx y = far_field_at(c, tb, angle_a + kPi);
  const double scale = std::max(std::abs(x), std::abs(y));
  return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

double calibrated_floor(const ContrastField& like, double k, const SolveOptions& opts) {
  const double R = 0.8 * like.L;
  const auto disk = make_contrast(make_disk(R), Profile{}, like.N, like.L);
  const auto t = solve(disk, k, IncidentField::plane(0.0), opts);
  const auto p = far_field(disk, t, 256);
  const auto o = disk_oracle(R, 2.0, k, 0.0, 256);
  return l2_distance(p, o.far);
}

std::vector<SweepEntry> sweep(const ContrastField& c, const IncidentField& inc, double k_min, double k_max, int steps,
                              const SolveOptions& opts) {
  if (!(k_min > 0.0) || !(k_max >= k_min)) throw DomainError("sweep: need 0 < k_min <= k_max");
  if (steps < 1) throw DomainError("sweep: steps must be >= 1");
  std::vector<SweepEntry> out;
  for (int i = 0; i < steps; ++i) {
    SweepEntry e;
    e.k = steps == 1 ? k_min : k_min + (k_max - k_min) * i / (steps - 1);
    try {
      const auto t = solve(c, e.k, inc, opts);
      const auto p = far_field(c, t, 256);
      e.norm = p.l2_norm;
      e.min_abs = std::abs(p.values[0]);
      e.max_abs = e.min_abs;
      for (const auto& v : p.values) {
        e.min_abs = std::min(e.min_abs, std::abs(v));
        e.max_abs = std::max(e.max_abs, std::abs(v));
      }
      e.residual = t.residual;
      e.floor = calibrated_floor(c, e.k, opts);
      e.flagged = e.norm < 10.0 * e.floor;
    } catch (const std::exception& ex) {
      e.failed = true;
      e.message = ex.what();
    }
    out.push_back(e);
  }
  return out;
}

// ------------------------------------------------------------ transmission residual

std::vector<double> one_sided_weights(int derivative, int points) {
  if (derivative < 0 || points < derivative + 1) throw DomainError("one_sided_weights: too few points");
  // Fornberg's recursion for nodes 0, 1, ..., points-1 at x0 = 0.
  const int n = points - 1, m = derivative;
  std::vector<std::vector<std::vector<double>>> c(
      static_cast<size_t>(m + 1), std::vector<std::vector<double>>(static_cast<size_t>(n + 1), std::vector<double>(static_cast<size_t>(n + 1), 0.0)));
  c[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i <= n; ++i) {
    double c2 = 1.0;
    for (int v = 0; v < i; ++v) {
      const double c3 = static_cast<double>(i - v);
      c2 *= c3;
      for (int d = 0; d <= std::min(i, m); ++d) {
        const double prev = c[static_cast<size_t>(d)][static_cast<size_t>(i - 1)][static_cast<size_t>(v)];
        const double lower = d > 0 ? c[static_cast<size_t>(d - 1)][static_cast<size_t>(i - 1)][static_cast<size_t>(v)] : 0.0;
        c[static_cast<size_t>(d)][static_cast<size_t>(i)][static_cast<size_t>(v)] = (static_cast<double>(i) * prev - d * lower) / c3;
      }
    }
    for (int d = 0; d <= std::min(i, m); ++d) {
      const double prev = c[static_cast<size_t>(d)][static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)];
      const double lower = d > 0 ? c[static_cast<size_t>(d - 1)][static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)] : 0.0;
      c[static_cast<size_t>(d)][static_cast<size_t>(i)][static_cast<size_t>(i)] = c1 / c2 * (d * lower - static_cast<double>(i - 1) * prev);
    }
    c1 = c2;
  }
  return c[static_cast<size_t>(m)][static_cast<size_t>(n)];
}

std::vector<double> transmission_residual(const std::function<cplx(const Point2&)>& u_outer,
                                          const std::function<cplx(const Point2&)>& u_inner,
                                          const std::vector<BoundarySample>& arc, int max_order, double h) {
  if (max_order < 0 || max_order > 6) throw DomainError("transmission_residual: order must lie in 0..6");
  if (!(h > 0.0)) throw DomainError("transmission_residual: step must be positive");
  std::vector<double> out(static_cast<size_t>(max_order + 1), 0.0);
  for (int j = 0; j <= max_order; ++j) {
    const int pts = j == 0 ? 1 : j + 6;
    const auto w = j == 0 ? std::vector<double>{1.0} : one_sided_weights(j, pts);
    const double scale = std::pow(h, -j);
    for (const auto& s : arc) {
      cplx d_out = 0.0, d_in = 0.0;
      for (int i = 0; i < pts; ++i) {
        const double t = i * h;
        d_out += w[static_cast<size_t>(i)] * u_outer({s.x[0] + t * s.normal[0], s.x[1] + t * s.normal[1]});
        d_in += w[static_cast<size_t>(i)] * u_inner({s.x[0] - t * s.normal[0], s.x[1] - t * s.normal[1]});
      }
      // inner samples run along -nu
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      const cplx diff = (d_out - sign * d_in) * scale;
      out[static_cast<size_t>(j)] = std::max(out[static_cast<size_t>(j)], std::abs(diff));
    }
  }
  return out;
}

// ------------------------------------------------------------ output

void write_far_field_csv(std::ostream& os, const FarFieldPattern& p) {
  os << "angle,re,im\n";
  char buf[128];
  for (size_t i = 0; i < p.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.angles[i], p.values[i].real(), p.values[i].imag());
    os << buf;
  }
}

void write_field_binary(std::ostream& os, const TotalField& t) {
  os.write("CSF1", 4);
  put_u32(os, static_cast<std::uint32_t>(t.N));
  put_u32(os, static_cast<std::uint32_t>(t.N));
  put_f64(os, -t.L);
  put_f64(os, t.L);
  put_f64(os, -t.L);
  put_f64(os, t.L);
  put_f64(os, t.k);
  for (const auto& z : t.u) {
    put_f64(os, z.real());
    put_f64(os, z.imag());
  }
}

}  // namespace cornerscat
