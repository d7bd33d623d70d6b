#include "cornerscat/poly_cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "cornerscat/errors.hpp"
#include "cornerscat/specfun.hpp"

namespace cornerscat {
namespace {

constexpr double kPi = std::numbers::pi;

Surd half_sqrt(int d) { return Surd(Rational(0), Rational(1, 2), d); }

// cos(a pi / 12) for a multiple of 2 or 3.
std::optional<Surd> cos_twelfths(long a) {
  a %= 24;
  if (a < 0) a += 24;
  if (a > 12) a = 24 - a;
  int sign = 1;
  if (a > 6) {
    a = 12 - a;
    sign = -1;
  }
  Surd v;
  switch (a) {
    case 0: v = Surd(1L); break;
    case 2: v = half_sqrt(3); break;
    case 3: v = half_sqrt(2); break;
    case 4: v = Surd(Rational(1, 2)); break;
    case 6: v = Surd(0L); break;
    default: return std::nullopt;
  }
  return sign > 0 ? v : -v;
}

template <typename S, typename Lift>
S power(const S& x, int n, Lift lift) {
  S r = lift(Rational(1));
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Delta^2 rows: coefficient of each degree d-4 monomial in Delta^2 of each column monomial.
template <typename S, typename Lift>
void append_bilaplacian_rows(BoundaryConditionSystem<S>& sys, Lift lift) {
  if (sys.degree < 4) return;
  const auto cols = monomial_basis(sys.dimension, sys.degree);
  const auto out = monomial_basis(sys.dimension, sys.degree - 4);
  std::vector<RationalPolynomial> images;
  for (const auto& c : cols) images.push_back(RationalPolynomial::monomial(sys.dimension, c).bilaplacian());
  for (const auto& o : out) {
    std::vector<S> row;
    for (const auto& img : images) row.push_back(lift(img.coefficient(o)));
    sys.rows.push_back(std::move(row));
    ++sys.bilaplacian_rows;
  }
}

// Trace and normal-derivative rows for the ray through (c, s), normal (-s, c).
template <typename S, typename Lift>
std::pair<std::vector<S>, std::vector<S>> ray_rows(const S& c, const S& s, int d, Lift lift) {
  std::vector<S> trace, normal;
  for (int i = 0; i <= d; ++i) {
    trace.push_back(power(c, d - i, lift) * power(s, i, lift));
    S nrm = lift(Rational(0));
    if (d - i > 0) nrm -= lift(Rational(d - i)) * s * power(c, d - i - 1, lift) * power(s, i, lift);
    if (i > 0) nrm += lift(Rational(i)) * c * power(c, d - i, lift) * power(s, i - 1, lift);
    normal.push_back(nrm);
  }
  return {trace, normal};
}

template <typename S, typename Lift>
BoundaryConditionSystem<S> sector_system(const S& c, const S& s, int degree, Lift lift) {
  BoundaryConditionSystem<S> sys;
  sys.dimension = 2;
  sys.degree = degree;
  append_bilaplacian_rows(sys, lift);
  auto [t0, n0] = ray_rows(lift(Rational(1)), lift(Rational(0)), degree, lift);
  auto [t1, n1] = ray_rows(c, s, degree, lift);
  sys.rows.push_back(t0);
  sys.rows.push_back(t1);
  sys.rows.push_back(n0);
  sys.rows.push_back(n1);
  sys.trace_rows = 2;
  sys.normal_rows = 2;
  return sys;
}

using Laurent = std::map<int, ComplexRational>;

Laurent laurent_mul(const Laurent& x, const Laurent& y) {
  Laurent out;
  for (const auto& [i, a] : x)
    for (const auto& [j, b] : y) out[i + j] += a * b;
  return out;
}

// cos^a(phi) sin^b(phi) = sum_k alpha_k cos k phi + beta_k sin k phi.
struct Fourier {
  std::vector<Rational> cos_coef;
  std::vector<Rational> sin_coef;
};

Fourier trig_monomial(int a, int b) {
  const Laurent cosp{{1, ComplexRational(Rational(1, 2))}, {-1, ComplexRational(Rational(1, 2))}};
  const Laurent sinp{{1, ComplexRational(Rational(0), Rational(-1, 2))}, {-1, ComplexRational(Rational(0), Rational(1, 2))}};
  Laurent acc{{0, ComplexRational(1L)}};
  for (int i = 0; i < a; ++i) acc = laurent_mul(acc, cosp);
  for (int i = 0; i < b; ++i) acc = laurent_mul(acc, sinp);
  const int d = a + b;
  Fourier f;
  f.cos_coef.assign(static_cast<size_t>(d + 1), Rational(0));
  f.sin_coef.assign(static_cast<size_t>(d + 1), Rational(0));
  auto get = [&](int k) { auto it = acc.find(k); return it == acc.end() ? ComplexRational() : it->second; };
  f.cos_coef[0] = get(0).re;
  for (int k = 1; k <= d; ++k) {
    const ComplexRational gp = get(k), gm = get(-k);
    f.cos_coef[static_cast<size_t>(k)] = (gp + gm).re;
    // i (g_k - g_{-k})
    f.sin_coef[static_cast<size_t>(k)] = -(gp - gm).im;
  }
  return f;
}

template <typename S, typename Lift>
BoundaryConditionSystem<S> cone_system(const S& c, const S& s, int degree, Lift lift) {
  BoundaryConditionSystem<S> sys;
  sys.dimension = 3;
  sys.degree = degree;
  append_bilaplacian_rows(sys, lift);
  const auto cols = monomial_basis(3, degree);
  std::vector<Fourier> four;
  std::vector<S> trace_factor, normal_factor;
  for (const auto& m : cols) {
    four.push_back(trig_monomial(m[0], m[1]));
    const int ab = m[0] + m[1], e = m[2];
    trace_factor.push_back(power(s, ab, lift) * power(c, e, lift));
    S nf = lift(Rational(0));
    if (ab > 0) nf += lift(Rational(ab)) * power(s, ab - 1, lift) * power(c, e + 1, lift);
    if (e > 0) nf -= lift(Rational(e)) * power(s, ab + 1, lift) * power(c, e - 1, lift);
    normal_factor.push_back(nf);
  }
  for (int pass = 0; pass < 2; ++pass) {
    const auto& factor = pass == 0 ? trace_factor : normal_factor;
    for (int k = 0; k <= degree; ++k) {
      for (int kind = 0; kind < (k == 0 ? 1 : 2); ++kind) {
        std::vector<S> row;
        for (size_t j = 0; j < cols.size(); ++j) {
          const auto& coefs = kind == 0 ? four[j].cos_coef : four[j].sin_coef;
          const Rational alpha = static_cast<size_t>(k) < coefs.size() ? coefs[static_cast<size_t>(k)] : Rational(0);
          row.push_back(lift(alpha) * factor[j]);
        }
        sys.rows.push_back(std::move(row));
        if (pass == 0)
          ++sys.trace_rows;
        else
          ++sys.normal_rows;
      }
    }
  }
  return sys;
}

auto surd_lift = [](const Rational& q) { return Surd(q); };
auto double_lift = [](const Rational& q) { return to_double(q); };

auto interval_lift(mpfr_prec_t prec) {
  return [prec](const Rational& q) { return Interval(q, prec); };
}

std::optional<PiFraction> sector_fraction(const SectorGeometry& g) {
  if (g.exact) return g.exact;
  if (g.is_excluded()) return PiFraction{1, 1};
  return std::nullopt;
}

std::optional<PiFraction> cone_fraction(const ConeGeometry& g) {
  if (g.exact) return g.exact;
  if (g.is_excluded()) return PiFraction{1, 2};
  return std::nullopt;
}

std::vector<HomogeneousPolynomial<Surd>> to_polynomials(int dim, int degree, const std::vector<std::vector<Surd>>& vs) {
  std::vector<HomogeneousPolynomial<Surd>> out;
  for (const auto& v : vs) out.push_back(HomogeneousPolynomial<Surd>::from_coefficients(dim, degree, v));
  return out;
}

template <typename BuildExact, typename BuildInterval>
NullspaceReport nullspace_impl(int dim, int degree, double omega, std::optional<PiFraction> frac,
                               const BoundaryConditionSystem<double>& fsys, const NullspaceOptions& opts,
                               BuildExact build_exact, BuildInterval build_interval) {
  if (degree < 2) throw DomainError("cauchy_nullspace: degree must be >= 2");
  NullspaceReport rep;
  rep.dimension = dim;
  rep.degree = degree;
  rep.omega = omega;
  rep.float_rank = float_rank(fsys);
  rep.rows = static_cast<int>(fsys.rows.size());
  rep.columns = fsys.columns();
  std::optional<std::pair<Surd, Surd>> dir;
  if (frac && !opts.force_interval) dir = exact_direction(*frac);
  if (dir) {
    const auto sys = build_exact(dir->first, dir->second);
    rep.method = "exact";
    rep.rank = exact_rank(sys.rows, rep.columns);
    rep.basis = to_polynomials(dim, degree, exact_nullspace(sys.rows, rep.columns));
    rep.certified = true;
    return rep;
  }
  const mpfr_prec_t prec = opts.precision_bits;
  if (prec < MPFR_PREC_MIN || prec > 100000) throw DomainError("precision bits out of range");
  const Interval angle = frac ? Interval::pi_fraction(frac->num, frac->den, prec) : Interval::from_double(omega, prec);
  const auto sys = build_interval(Interval::cos(angle), Interval::sin(angle));
  const auto res = certify_full_column_rank(sys.rows, rep.columns);
  rep.method = "interval";
  rep.precision_bits = prec;
  rep.rank = res.certified_pivots;
  rep.min_pivot_mignitude = res.min_pivot_mignitude;
  rep.max_interval_width = res.max_width;
  if (!res.full_column_rank) {
    throw CertificationError("interval rank inconclusive: " + std::to_string(res.certified_pivots) + " of " +
                             std::to_string(rep.columns) + " pivots certified at " + std::to_string(prec) + " bits");
  }
  rep.certified = true;
  return rep;
}

double scale_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::optional<std::pair<Surd, Surd>> exact_direction(const PiFraction& angle) {
  if (angle.den <= 0) return std::nullopt;
  const long g = std::gcd(angle.num, angle.den);
  const long num = angle.num / g, den = angle.den / g;
  if (12 % den != 0 || den == 12) return std::nullopt;
  const long a = num * (12 / den);
  auto c = cos_twelfths(a);
  auto s = cos_twelfths(6 - a);
  if (!c || !s) return std::nullopt;
  return std::make_pair(*c, *s);
}

BoundaryConditionSystem<Surd> sector_system_exact(const Surd& c, const Surd& s, int degree) {
  return sector_system(c, s, degree, surd_lift);
}

BoundaryConditionSystem<Interval> sector_system_interval(const Interval& c, const Interval& s, int degree) {
  return sector_system(c, s, degree, interval_lift(c.precision()));
}

BoundaryConditionSystem<double> sector_system_float(double omega, int degree) {
  return sector_system(std::cos(omega), std::sin(omega), degree, double_lift);
}

BoundaryConditionSystem<Surd> cone_system_exact(const Surd& c, const Surd& s, int degree) {
  return cone_system(c, s, degree, surd_lift);
}

BoundaryConditionSystem<Interval> cone_system_interval(const Interval& c, const Interval& s, int degree) {
  return cone_system(c, s, degree, interval_lift(c.precision()));
}

BoundaryConditionSystem<double> cone_system_float(double omega, int degree) {
  return cone_system(std::cos(omega), std::sin(omega), degree, double_lift);
}

int float_rank(const BoundaryConditionSystem<double>& sys) {
  const int ncols = sys.columns();
  if (sys.rows.empty()) return 0;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(sys.rows.size()), ncols);
  for (size_t i = 0; i < sys.rows.size(); ++i) {
    // Delta^2 rows carry integer factors up to ~d^4; bring them to unit size.
    const double m = static_cast<int>(i) < sys.bilaplacian_rows ? scale_of(sys.rows[i]) : 1.0;
    for (int j = 0; j < ncols; ++j) a(static_cast<Eigen::Index>(i), j) = sys.rows[i][static_cast<size_t>(j)] / m;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * sv(0)) ++rank;
  return rank;
}

NullspaceReport cauchy_nullspace(const SectorGeometry& geom, int degree, const NullspaceOptions& opts) {
  const auto frac = sector_fraction(geom);
  const double omega = frac ? frac->radians() : geom.omega;
  return nullspace_impl(
      2, degree, omega, frac, sector_system_float(omega, degree), opts,
      [&](const Surd& c, const Surd& s) { return sector_system_exact(c, s, degree); },
      [&](const Interval& c, const Interval& s) { return sector_system_interval(c, s, degree); });
}

NullspaceReport cauchy_nullspace(const ConeGeometry& geom, int degree, const NullspaceOptions& opts) {
  const auto frac = cone_fraction(geom);
  const double omega = frac ? frac->radians() : geom.omega;
  return nullspace_impl(
      3, degree, omega, frac, cone_system_float(omega, degree), opts,
      [&](const Surd& c, const Surd& s) { return cone_system_exact(c, s, degree); },
      [&](const Interval& c, const Interval& s) { return cone_system_interval(c, s, degree); });
}

// ------------------------------------------------------------------ 2D special solutions

namespace {

struct SectorDirection {
  Surd c;
  Surd s;
  bool exact = false;
};

SectorDirection sector_direction(const SectorGeometry& geom) {
  if (auto frac = sector_fraction(geom)) {
    if (auto d = exact_direction(*frac)) return {d->first, d->second, true};
  }
  return {Surd(rational_from_double(std::cos(geom.omega))), Surd(rational_from_double(std::sin(geom.omega))), false};
}

double sector_omega(const SectorGeometry& geom) {
  if (auto frac = sector_fraction(geom)) return frac->radians();
  return geom.omega;
}

// (kappa + 2) omega / pi as an integer, if it is one.
std::optional<long> resonance_index(const SectorGeometry& geom, int mu) {
  if (auto frac = sector_fraction(geom)) {
    if ((mu * frac->num) % frac->den == 0) return mu * frac->num / frac->den;
    return std::nullopt;
  }
  const double x = mu * geom.omega / kPi;
  const double r = std::round(x);
  if (r >= 1.0 && std::abs(x - r) < 1e-12) return static_cast<long>(r);
  return std::nullopt;
}

void laplacian_row_block(int degree, ExactMatrix<Surd>& rows) {
  // Rows of Delta: column j = monomial j of degree `degree`, row i = monomial i of degree-2.
  const auto cols = monomial_basis(2, degree);
  const auto out = monomial_basis(2, degree - 2);
  std::vector<RationalPolynomial> images;
  for (const auto& c : cols) images.push_back(RationalPolynomial::monomial(2, c).laplacian());
  for (const auto& o : out) {
    std::vector<Surd> row;
    for (const auto& img : images) row.push_back(Surd(img.coefficient(o)));
    rows.push_back(std::move(row));
  }
}

HomogeneousPolynomial<Surd> to_surd(const RationalPolynomial& p) {
  return p.convert<Surd>([](const Rational& q) { return Surd(q); });
}

struct PolarLog {
  double mu;
  BoundaryCondition bc;
  // Dirichlet: r^mu (ln r sin mu t + t cos mu t); Neumann: r^mu (ln r cos mu t - t sin mu t).
  double value(double r, double t) const {
    const double lr = std::log(r), rm = std::pow(r, mu);
    if (bc == BoundaryCondition::Dirichlet) return rm * (lr * std::sin(mu * t) + t * std::cos(mu * t));
    return rm * (lr * std::cos(mu * t) - t * std::sin(mu * t));
  }
  double dr(double r, double t) const {
    const double lr = std::log(r), rm1 = std::pow(r, mu - 1);
    if (bc == BoundaryCondition::Dirichlet)
      return rm1 * (mu * (lr * std::sin(mu * t) + t * std::cos(mu * t)) + std::sin(mu * t));
    return rm1 * (mu * (lr * std::cos(mu * t) - t * std::sin(mu * t)) + std::cos(mu * t));
  }
  // (1/r) d/dtheta
  double dt_over_r(double r, double t) const {
    const double lr = std::log(r), rm1 = std::pow(r, mu - 1);
    if (bc == BoundaryCondition::Dirichlet)
      return rm1 * (mu * lr * std::cos(mu * t) + std::cos(mu * t) - mu * t * std::sin(mu * t));
    return rm1 * (-mu * lr * std::sin(mu * t) - std::sin(mu * t) - mu * t * std::cos(mu * t));
  }
};

}  // namespace

SpecialSolution2D special_solution_2d(const RationalPolynomial& p, const SectorGeometry& geom, BoundaryCondition bc) {
  if (p.dimension() != 2) throw DomainError("special_solution_2d: p must be two-dimensional");
  const int kappa = p.degree();
  const int mu = kappa + 2;
  SpecialSolution2D sol;
  sol.polynomial_part = HomogeneousPolynomial<Surd>(2, mu);
  if (p.is_zero()) return sol;

  const auto dir = sector_direction(geom);
  const auto n_index = resonance_index(geom, mu);
  sol.resonant = n_index.has_value();

  ExactMatrix<Surd> rows;
  laplacian_row_block(mu, rows);
  std::vector<Surd> rhs;
  for (const auto& m : monomial_basis(2, kappa)) rhs.push_back(Surd(p.coefficient(m)));
  auto [t0, n0] = ray_rows(Surd(1L), Surd(0L), mu, surd_lift);
  auto [t1, n1] = ray_rows(dir.c, dir.s, mu, surd_lift);
  const bool dirichlet = bc == BoundaryCondition::Dirichlet;
  rows.push_back(dirichlet ? t0 : n0);
  rhs.push_back(Surd(0L));
  if (!sol.resonant) {
    rows.push_back(dirichlet ? t1 : n1);
    rhs.push_back(Surd(0L));
  }
  const auto res = exact_solve(rows, rhs, mu + 1);
  if (!res) throw DomainError("special_solution_2d: inconsistent boundary system");
  sol.polynomial_part = HomogeneousPolynomial<Surd>::from_coefficients(2, mu, res->particular);
  if (!sol.resonant) return sol;

  const double omega = sector_omega(geom);
  const double sign = (*n_index % 2 == 0) ? 1.0 : -1.0;
  const double c = std::cos(omega), s = std::sin(omega);
  LogTerm term;
  term.exponent = mu;
  if (dirichlet) {
    const double q = sol.polynomial_part.evaluate({c, s, 0.0}).real();
    term.coefficient = -q / (omega * sign);
    term.profile = "r^mu (ln r sin(mu theta) + theta cos(mu theta))";
  } else {
    const auto& qp = sol.polynomial_part;
    const double dq = -s * qp.derivative(0).evaluate({c, s, 0.0}).real() + c * qp.derivative(1).evaluate({c, s, 0.0}).real();
    term.coefficient = dq / (mu * omega * sign);
    term.profile = "r^mu (ln r cos(mu theta) - theta sin(mu theta))";
  }
  sol.log_terms.push_back(term);
  return sol;
}

ResidualReport verify_special_solution(const SpecialSolution2D& sol, const RationalPolynomial& p,
                                       const SectorGeometry& geom, BoundaryCondition bc) {
  ResidualReport rep;
  const auto& q = sol.polynomial_part;
  const auto ps = to_surd(p);
  rep.exact_pde = (q.laplacian() - ps).is_zero() || (p.is_zero() && q.laplacian().is_zero());
  const auto dir = sector_direction(geom);
  const bool dirichlet = bc == BoundaryCondition::Dirichlet;
  auto edge_zero = [&](const Surd& c, const Surd& s) {
    const std::array<Surd, 3> x{c, s, Surd(0L)};
    if (dirichlet) return q.evaluate_exact(x).is_zero();
    return (-s * q.derivative(0).evaluate_exact(x) + c * q.derivative(1).evaluate_exact(x)).is_zero();
  };
  rep.exact_boundary = dir.exact && !sol.resonant && edge_zero(Surd(1L), Surd(0L)) && edge_zero(dir.c, dir.s);

  const double omega = sector_omega(geom);
  std::optional<PolarLog> log;
  double cl = 0.0;
  if (!sol.log_terms.empty()) {
    log = PolarLog{sol.log_terms[0].exponent, bc};
    cl = sol.log_terms[0].coefficient.real();
  }
  const auto lq = q.laplacian();
  auto v = [&](double r, double t) {
    double val = q.evaluate({r * std::cos(t), r * std::sin(t), 0.0}).real();
    if (log) val += cl * log->value(r, t);
    return val;
  };
  auto log_cart = [&](double x, double y) { return log->value(std::hypot(x, y), std::atan2(y, x)); };
  for (int i = 0; i <= 8; ++i) {
    const double r = 0.1 + 0.1 * i;
    for (int j = 0; j <= 16; ++j) {
      const double t = omega * j / 16.0;
      const double x = r * std::cos(t), y = r * std::sin(t);
      double lap = lq.evaluate({x, y, 0.0}).real();
      if (log && j > 0 && j < 16) {
        // fourth-order 9-point differences of the log term
        const double h = 1e-3;
        double d2 = 0.0;
        for (int axis = 0; axis < 2; ++axis) {
          auto f = [&](double s) { return axis == 0 ? log_cart(x + s, y) : log_cart(x, y + s); };
          d2 += (-f(2 * h) + 16 * f(h) - 30 * f(0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
        }
        lap += cl * d2;
      }
      rep.pde = std::max(rep.pde, std::abs(lap - p.evaluate({x, y, 0.0}).real()));
    }
    for (double t : {0.0, omega}) {
      const double c = std::cos(t), s = std::sin(t);
      const double x = r * c, y = r * s;
      double dn = -s * q.derivative(0).evaluate({x, y, 0.0}).real() + c * q.derivative(1).evaluate({x, y, 0.0}).real();
      if (log) dn += cl * log->dt_over_r(r, t);
      rep.boundary_value = std::max(rep.boundary_value, std::abs(v(r, t)));
      rep.boundary_normal = std::max(rep.boundary_normal, std::abs(dn));
    }
  }
  rep.boundary_condition = dirichlet ? rep.boundary_value : rep.boundary_normal;
  rep.boundary_checked = true;
  return rep;
}

WedgeFamily wedge_nullspace_2d_family(const SectorGeometry& geom, int degree, const RationalPolynomial& rhs) {
  if (rhs.dimension() != 2) throw DomainError("wedge_nullspace_2d_family: rhs must be two-dimensional");
  if (!rhs.laplacian().is_zero()) throw DomainError("wedge_nullspace_2d_family: rhs is not harmonic");
  if (degree < 2) throw DomainError("wedge_nullspace_2d_family: degree must be >= 2");
  if (!rhs.is_zero() && rhs.degree() != degree - 2)
    throw DomainError("wedge_nullspace_2d_family: rhs degree must be degree - 2");
  const auto dir = sector_direction(geom);
  ExactMatrix<Surd> rows;
  laplacian_row_block(degree, rows);
  std::vector<Surd> b;
  for (const auto& m : monomial_basis(2, degree - 2)) b.push_back(Surd(rhs.coefficient(m)));
  auto [t0, n0] = ray_rows(Surd(1L), Surd(0L), degree, surd_lift);
  auto [t1, n1] = ray_rows(dir.c, dir.s, degree, surd_lift);
  for (auto* r : {&t0, &t1, &n0, &n1}) {
    rows.push_back(*r);
    b.push_back(Surd(0L));
  }
  WedgeFamily fam;
  fam.particular = HomogeneousPolynomial<Surd>(2, degree);
  const auto sol = exact_solve(rows, b, degree + 1);
  if (!sol) return fam;
  fam.consistent = true;
  fam.particular = HomogeneousPolynomial<Surd>::from_coefficients(2, degree, sol->particular);
  fam.homogeneous = to_polynomials(2, degree, sol->homogeneous);
  return fam;
}

// ------------------------------------------------------------------ cone special solutions

namespace {

// Coefficients of d^m/dt^m P_l(t), index = power of t.
std::vector<Rational> legendre_derivative_coefficients(int l, int m) {
  std::vector<Rational> c(static_cast<size_t>(l + 1), Rational(0));
  auto binom = [](int n, int k) {
    Rational r(1);
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  for (int k = 0; 2 * k <= l; ++k) {
    Rational v = binom(l, k) * binom(2 * l - 2 * k, l);
    if (k % 2) v = -v;
    c[static_cast<size_t>(l - 2 * k)] = v / Rational(boost::multiprecision::mpz_int(1) << l);
  }
  for (int d = 0; d < m; ++d) {
    std::vector<Rational> nc(c.size(), Rational(0));
    for (size_t i = 1; i < c.size(); ++i) nc[i - 1] = c[i] * static_cast<long>(i);
    c = nc;
  }
  return c;
}

// r^l P_l^{|m|}(cos theta) e^{i m phi} = (x1 +- i x2)^{|m|} sum_j d_j x3^{l-|m|-2j} |x|^{2j}.
}  // namespace

HomogeneousPolynomial<ComplexRational> legendre_solid_harmonic_exact(int l, int m) {
  const int am = std::abs(m);
  if (am > l) throw DomainError("solid harmonic: |m| > l");
  using P = HomogeneousPolynomial<ComplexRational>;
  const auto d = legendre_derivative_coefficients(l, am);
  P radial(3, l - am);
  for (int j = 0; l - am - 2 * j >= 0; ++j) {
    const int e = l - am - 2 * j;
    const Rational coef = d[static_cast<size_t>(e)];
    if (coef.is_zero()) continue;
    radial += (P::monomial(3, {0, 0, e}) * P::radial_power(3, j)).scaled(ComplexRational(coef));
  }
  P lin(3, 1);
  lin.set({1, 0, 0}, ComplexRational(1L));
  lin.set({0, 1, 0}, ComplexRational(Rational(0), Rational(m >= 0 ? 1 : -1)));
  P out = P::monomial(3, {0, 0, 0});
  for (int i = 0; i < am; ++i) out = out * lin;
  return out * radial;
}

namespace {

HomogeneousPolynomial<ComplexRational> legendre_solid_exact(int l, int m) { return legendre_solid_harmonic_exact(l, m); }

HomogeneousPolynomial<std::complex<double>> to_complex_poly(const HomogeneousPolynomial<ComplexRational>& p,
                                                            std::complex<double> scale) {
  return p.convert<std::complex<double>>([&](const ComplexRational& z) { return to_complex(z) * scale; });
}

double cone_cos(const ConeGeometry& g) {
  if (auto f = cone_fraction(g)) return std::cos(f->radians());
  return std::cos(g.omega);
}

double cone_omega(const ConeGeometry& g) {
  if (auto f = cone_fraction(g)) return f->radians();
  return g.omega;
}

double legendre_value(int l, int m, double t, BoundaryCondition bc) {
  const specfun::LegendreArg arg{static_cast<double>(l), std::abs(m), t};
  return bc == BoundaryCondition::Dirichlet ? specfun::legendre_p(arg) : specfun::legendre_p_dt(arg);
}

double legendre_scale(int l, int m, BoundaryCondition bc) {
  double s = 0.0;
  for (int i = 1; i < 64; ++i) s = std::max(s, std::abs(legendre_value(l, m, -1.0 + 2.0 * i / 64.0, bc)));
  return std::max(s, 1.0);
}

double cap_integral(int nodes, double t0, const std::function<double(double)>& f) {
  const auto rule = specfun::gauss_legendre(nodes);
  double sum = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 0.5 * (1.0 - t0) * rule.nodes[i] + 0.5 * (1.0 + t0);
    sum += rule.weights[i] * f(t);
  }
  return sum * 0.5 * (1.0 - t0) * 2.0 * kPi;
}

}  // namespace

HomogeneousPolynomial<std::complex<double>> legendre_solid_harmonic(int l, int m) {
  return to_complex_poly(legendre_solid_exact(l, m), 1.0);
}

HomogeneousPolynomial<std::complex<double>> solid_harmonic(int n, int m) {
  return to_complex_poly(legendre_solid_exact(n, m), specfun::spherical_harmonic_norm(n, m));
}

HomogeneousPolynomial<std::complex<double>> radial_solid_harmonic(int n, int m, int j) {
  auto p = legendre_solid_exact(n, m) * HomogeneousPolynomial<ComplexRational>::radial_power(3, j);
  return to_complex_poly(p, specfun::spherical_harmonic_norm(n, m));
}

SpecialSolutionCone special_solution_cone(const std::vector<SolidHarmonicTerm>& p, int kappa, const ConeGeometry& geom,
                                          BoundaryCondition bc) {
  if (kappa < 0) throw DomainError("special_solution_cone: kappa must be >= 0");
  SpecialSolutionCone sol;
  sol.kappa = kappa;
  sol.bc = bc;
  sol.polynomial_part = HomogeneousPolynomial<std::complex<double>>(3, kappa + 2);
  const double t0 = cone_cos(geom);
  const int mu = kappa + 2;
  for (const auto& term : p) {
    if (term.n < 0 || std::abs(term.m) > term.n || term.n > kappa || (kappa - term.n) % 2 != 0)
      throw DomainError("special_solution_cone: need |m| <= n <= kappa with kappa - n even");
    if (term.a == std::complex<double>(0.0, 0.0)) continue;
    const long denom = static_cast<long>(mu) * (mu + 1) - static_cast<long>(term.n) * (term.n + 1);
    if (denom <= 0) throw DomainError("special_solution_cone: nonpositive zeta denominator");
    ConeComponent comp;
    comp.term = term;
    comp.zeta = Rational(1, denom);
    const double zeta = to_double(comp.zeta);
    const int j = (mu - term.n) / 2;
    sol.polynomial_part += radial_solid_harmonic(term.n, term.m, j).scaled(zeta * term.a);

    const double den = legendre_value(mu, term.m, t0, bc);
    comp.resonant = std::abs(den) <= 1e-9 * legendre_scale(mu, term.m, bc);
    if (!comp.resonant) {
      const double num = legendre_value(term.n, term.m, t0, bc);
      comp.correction = zeta * term.a * specfun::spherical_harmonic_norm(term.n, term.m) * num / den;
      sol.polynomial_part -= legendre_solid_harmonic(mu, term.m).scaled(comp.correction);
    } else {
      const double nn = specfun::spherical_harmonic_norm(term.n, term.m);
      const double nk = specfun::spherical_harmonic_norm(mu, term.m);
      auto pn = [&](double t) { return specfun::legendre_p({static_cast<double>(term.n), std::abs(term.m), t}); };
      auto pk = [&](double t) { return specfun::legendre_p({static_cast<double>(mu), std::abs(term.m), t}); };
      auto ratio = [&](int nodes) {
        const double cross = cap_integral(nodes, t0, [&](double t) { return nn * pn(t) * nk * pk(t); });
        const double self = cap_integral(nodes, t0, [&](double t) { return nk * nk * pk(t) * pk(t); });
        return cross / ((2.0 * kappa + 5.0) * self);
      };
      const double c256 = ratio(256), c128 = ratio(128);
      if (std::abs(c256 - c128) > 1e-12 * std::max(1.0, std::abs(c256)))
        throw ConvergenceError("special_solution_cone: cap quadrature did not converge");
      comp.log_constant = c256 * term.a;
      sol.resonant = true;
      LogTerm lt;
      lt.coefficient = comp.log_constant;
      lt.exponent = mu;
      lt.order = term.m;
      lt.profile = "r^mu (ln r Y_mu^m + psi), psi not constructed";
      sol.log_terms.push_back(lt);
    }
    sol.components.push_back(comp);
  }
  return sol;
}

ResidualReport verify_special_solution(const SpecialSolutionCone& sol, const std::vector<SolidHarmonicTerm>& p,
                                       const ConeGeometry& geom, BoundaryCondition bc, int samples) {
  ResidualReport rep;
  HomogeneousPolynomial<std::complex<double>> pp(3, sol.kappa);
  for (const auto& t : p) pp += radial_solid_harmonic(t.n, t.m, (sol.kappa - t.n) / 2).scaled(t.a);
  const auto lq = sol.polynomial_part.laplacian();
  const auto dq = std::array{sol.polynomial_part.derivative(0), sol.polynomial_part.derivative(1),
                             sol.polynomial_part.derivative(2)};
  const double omega = cone_omega(geom);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ur(0.1, 0.9), ut(0.0, omega), up(0.0, 2.0 * kPi);
  for (int i = 0; i < samples; ++i) {
    const double r = ur(rng), th = ut(rng), ph = up(rng);
    const std::array<double, 3> x{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)};
    rep.pde = std::max(rep.pde, std::abs(lq.evaluate(x) - pp.evaluate(x)));
  }
  if (!sol.resonant) {
    const double c = std::cos(omega), s = std::sin(omega);
    for (int i = 0; i < samples; ++i) {
      const double r = ur(rng), ph = up(rng);
      const std::array<double, 3> x{r * s * std::cos(ph), r * s * std::sin(ph), r * c};
      // unit theta-direction at theta = omega
      const std::array<double, 3> e{c * std::cos(ph), c * std::sin(ph), -s};
      std::complex<double> dn = 0.0;
      for (int k = 0; k < 3; ++k) dn += e[static_cast<size_t>(k)] * dq[static_cast<size_t>(k)].evaluate(x);
      rep.boundary_value = std::max(rep.boundary_value, std::abs(sol.polynomial_part.evaluate(x)));
      rep.boundary_normal = std::max(rep.boundary_normal, std::abs(dn));
    }
    rep.boundary_condition = bc == BoundaryCondition::Dirichlet ? rep.boundary_value : rep.boundary_normal;
    rep.boundary_checked = true;
  }
  return rep;
}

// ------------------------------------------------------------------ JSON

namespace {

nlohmann::json rational_pair(const Rational& q) {
  return nlohmann::json::array({numerator(q).str(), denominator(q).str()});
}

Rational parse_rational(const nlohmann::json& num, const nlohmann::json& den) {
  auto as_str = [](const nlohmann::json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); };
  return Rational(boost::multiprecision::mpz_int(as_str(num)), boost::multiprecision::mpz_int(as_str(den)));
}

nlohmann::json index_json(int dim, const MultiIndex& a) {
  auto j = nlohmann::json::array({a[0], a[1]});
  if (dim == 3) j.push_back(a[2]);
  return j;
}

}  // namespace

nlohmann::json to_json(const RationalPolynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [a, c] : p.terms()) {
    terms.push_back({index_json(p.dimension(), a), numerator(c).str(), denominator(c).str()});
  }
  return {{"dimension", p.dimension()}, {"degree", p.degree()}, {"terms", terms}};
}

nlohmann::json to_json(const HomogeneousPolynomial<Surd>& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [a, c] : p.terms()) {
    nlohmann::json coef = {{"rational", rational_pair(c.rational_part())}};
    if (!c.is_rational()) {
      coef["surd"] = rational_pair(c.surd_part());
      coef["radicand"] = c.radicand();
    }
    terms.push_back({index_json(p.dimension(), a), coef});
  }
  return {{"dimension", p.dimension()}, {"degree", p.degree()}, {"terms", terms}};
}

nlohmann::json to_json(const HomogeneousPolynomial<ComplexRational>& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [a, c] : p.terms()) terms.push_back({index_json(p.dimension(), a), rational_pair(c.re), rational_pair(c.im)});
  return {{"dimension", p.dimension()}, {"degree", p.degree()}, {"terms", terms}};
}

nlohmann::json to_json(const NullspaceReport& r) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : r.basis) basis.push_back(to_json(b));
  nlohmann::json j = {{"dimension", r.dimension}, {"degree", r.degree},   {"omega", r.omega},
                      {"method", r.method},       {"rows", r.rows},       {"columns", r.columns},
                      {"rank", r.rank},           {"float_rank", r.float_rank}, {"certified", r.certified},
                      {"nullity", r.basis.size()}, {"basis", basis}};
  if (r.method == "interval") {
    j["precision_bits"] = r.precision_bits;
    j["min_pivot_mignitude"] = r.min_pivot_mignitude;
    j["max_interval_width"] = r.max_interval_width;
  }
  return j;
}

RationalPolynomial rational_polynomial_from_json(const nlohmann::json& j) {
  const int dim = j.at("dimension").get<int>();
  const int degree = j.at("degree").get<int>();
  RationalPolynomial p(dim, degree);
  for (const auto& t : j.at("terms")) {
    const auto& idx = t.at(0);
    MultiIndex a{idx.at(0).get<int>(), idx.at(1).get<int>(), dim == 3 ? idx.at(2).get<int>() : 0};
    p.add_to(a, parse_rational(t.at(1), t.at(2)));
  }
  return p;
}

}  // namespace cornerscat
