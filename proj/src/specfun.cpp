#include "cornerscat/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "cornerscat/errors.hpp"

namespace cornerscat::specfun {
namespace {

using ld = long double;

constexpr int kMaxSeriesTerms = 200000;
constexpr ld kSeriesTol = 1e-18L;

void validate(const LegendreArg& arg) {
  if (!(std::abs(arg.t) < 1.0)) {
    throw DomainError("legendre: |t| must be < 1, got t = " + std::to_string(arg.t));
  }
  if (arg.order < 0) throw DomainError("legendre: order must be non-negative");
  if (!std::isfinite(arg.degree)) throw DomainError("legendre: degree must be finite");
}

// P_lambda^m = P_{-lambda-1}^m, so work with lambda >= -1/2.
ld canonical_degree(double lambda) {
  return lambda < -0.5 ? -static_cast<ld>(lambda) - 1.0L : static_cast<ld>(lambda);
}

bool is_integer_degree(ld lambda, long* n) {
  const ld r = std::round(lambda);
  if (std::abs(lambda - r) <= 1e-13L * std::max<ld>(1.0L, std::abs(lambda))) {
    *n = static_cast<long>(r);
    return true;
  }
  return false;
}

// Stable upward recurrence in degree for integer n >= m.
ld legendre_integer(long n, int m, ld t) {
  if (m > n) return 0.0L;
  const ld s = std::sqrt((1.0L - t) * (1.0L + t));
  ld pmm = 1.0L;
  for (int k = 1; k <= m; ++k) pmm *= static_cast<ld>(2 * k - 1) * s;
  if (n == m) return pmm;
  ld pm1 = static_cast<ld>(2 * m + 1) * t * pmm;
  if (n == m + 1) return pm1;
  ld prev = pmm;
  ld cur = pm1;
  for (long l = m + 1; l < n; ++l) {
    const ld next = (static_cast<ld>(2 * l + 1) * t * cur - static_cast<ld>(l + m) * prev) /
                    static_cast<ld>(l - m + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

// 2F1(a, b; c; z) by direct summation, 0 <= z <= 1/2 in practice.
ld hypergeometric_2f1(ld a, ld b, ld c, ld z) {
  ld term = 1.0L;
  ld sum = 1.0L;
  const ld growth_end = std::abs(a) + std::abs(b) + 2.0L;
  int small_run = 0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z;
    sum += term;
    if (term == 0.0L) return sum;
    if (n > growth_end && std::abs(term) <= kSeriesTol * std::abs(sum)) {
      if (++small_run >= 2) return sum;
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("legendre: hypergeometric series did not converge");
}

// Direct representation, valid for t > -1 and accurate for t >= 0:
// P^m = (1-t^2)^{m/2} / (2^m m!) prod_{k<m} (l-k)(l+k+1) 2F1(m-l, m+l+1; m+1; (1-t)/2).
ld legendre_direct(ld lambda, int m, ld t) {
  ld pref = 1.0L;
  const ld s = std::sqrt((1.0L - t) * (1.0L + t));
  for (int k = 0; k < m; ++k) {
    pref *= (lambda - k) * (lambda + k + 1) / (2.0L * (k + 1)) * s;
  }
  if (pref == 0.0L) return 0.0L;
  return pref * hypergeometric_2f1(m - lambda, m + lambda + 1.0L, m + 1.0L, (1.0L - t) / 2.0L);
}

// Expansion about t = -1 (w = (1+t)/2) for non-integer lambda, logarithmic case of
// the 2F1 connection formula with c - a - b = 0:
//   P_l(t) = -(sin(pi l)/pi) sum_n (-l)_n (l+1)_n/(n!)^2 [2psi(n+1) - psi(n-l) - psi(n+l+1) - ln w] w^n.
// Returns P and dP/dt.
void legendre_log_expansion(ld lambda, ld t, ld* p, ld* dp) {
  using boost::math::digamma;
  const ld w = (1.0L + t) / 2.0L;
  const ld lnw = std::log(w);
  const ld factor = -std::sin(std::numbers::pi_v<ld> * lambda) / std::numbers::pi_v<ld>;

  ld coef = 1.0L;  // (-l)_n (l+1)_n / (n!)^2
  ld psi1 = digamma(1.0L);
  ld psi_a = digamma(-lambda);
  ld psi_b = digamma(lambda + 1.0L);
  ld wn = 1.0L;  // w^n
  ld sum = 0.0L;
  ld dsum = -1.0L / w;  // d/dw of the n = 0 term: -c_0 / w
  sum += coef * (2.0L * psi1 - psi_a - psi_b - lnw);
  const ld growth_end = 2.0L * std::abs(lambda) + 2.0L;
  int small_run = 0;
  for (int n = 1; n < kMaxSeriesTerms; ++n) {
    coef *= (n - 1 - lambda) * (n + lambda) / (static_cast<ld>(n) * n);
    psi1 += 1.0L / n;
    psi_a += 1.0L / (n - 1 - lambda);
    psi_b += 1.0L / (n + lambda);
    const ld g = 2.0L * psi1 - psi_a - psi_b - lnw;
    const ld wprev = wn;
    wn *= w;
    const ld term = coef * g * wn;
    const ld dterm = coef * (n * g - 1.0L) * wprev;
    sum += term;
    dsum += dterm;
    const bool small = std::abs(term) <= kSeriesTol * std::abs(sum) &&
                       std::abs(dterm) <= kSeriesTol * std::abs(dsum);
    if (n > growth_end && small) {
      if (++small_run >= 2) {
        *p = factor * sum;
        *dp = factor * dsum / 2.0L;  // dw/dt = 1/2
        return;
      }
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("legendre: logarithmic expansion did not converge");
}

// P^m for m in [0, mmax] on the t < 0 branch: log expansion for m = 0, 1 then the
// order recurrence P^{m+2} = 2(m+1) t/sqrt(1-t^2) P^{m+1} - (l-m)(l+m+1) P^m.
std::vector<ld> legendre_orders_negative(ld lambda, int mmax, ld t) {
  ld p0 = 0.0L;
  ld dp0 = 0.0L;
  legendre_log_expansion(lambda, t, &p0, &dp0);
  const ld s = std::sqrt((1.0L - t) * (1.0L + t));
  std::vector<ld> out(static_cast<size_t>(mmax) + 1);
  out[0] = p0;
  if (mmax >= 1) out[1] = s * dp0;
  for (int m = 0; m + 2 <= mmax; ++m) {
    out[m + 2] = 2.0L * (m + 1) * t / s * out[m + 1] - (lambda - m) * (lambda + m + 1) * out[m];
  }
  return out;
}

// Evaluates P^m and P^{m+1} together.
void legendre_pair(double degree, int m, double tt, ld* pm, ld* pm1) {
  const ld lambda = canonical_degree(degree);
  const ld t = tt;
  long n = 0;
  if (is_integer_degree(lambda, &n)) {
    *pm = legendre_integer(n, m, t);
    *pm1 = legendre_integer(n, m + 1, t);
    return;
  }
  if (t >= 0.0L) {
    *pm = legendre_direct(lambda, m, t);
    *pm1 = legendre_direct(lambda, m + 1, t);
    return;
  }
  const auto orders = legendre_orders_negative(lambda, m + 1, t);
  *pm = orders[m];
  *pm1 = orders[m + 1];
}

}  // namespace

double legendre_p(const LegendreArg& arg) {
  validate(arg);
  const ld lambda = canonical_degree(arg.degree);
  long n = 0;
  if (is_integer_degree(lambda, &n)) return static_cast<double>(legendre_integer(n, arg.order, arg.t));
  if (arg.t >= 0.0) return static_cast<double>(legendre_direct(lambda, arg.order, arg.t));
  return static_cast<double>(legendre_orders_negative(lambda, arg.order, arg.t)[arg.order]);
}

double legendre_p_dt(const LegendreArg& arg) {
  validate(arg);
  ld pm = 0.0L;
  ld pm1 = 0.0L;
  legendre_pair(arg.degree, arg.order, arg.t, &pm, &pm1);
  const ld t = arg.t;
  const ld one_minus = (1.0L - t) * (1.0L + t);
  // d/dt[(1-t^2)^{m/2} D^m P] = -m t/(1-t^2) P^m + P^{m+1}/sqrt(1-t^2)
  return static_cast<double>(-arg.order * t / one_minus * pm + pm1 / std::sqrt(one_minus));
}

double legendre_p_dt2(const LegendreArg& arg) {
  const double f = legendre_p(arg);
  const double df = legendre_p_dt(arg);
  const double t = arg.t;
  const double one_minus = (1.0 - t) * (1.0 + t);
  const double lam = arg.degree;
  const double m2 = static_cast<double>(arg.order) * arg.order;
  return (2.0 * t * df - (lam * (lam + 1.0) - m2 / one_minus) * f) / one_minus;
}

double legendre_p_dlambda(const LegendreArg& arg) {
  const double h = 1e-6 * std::max(1.0, std::abs(arg.degree));
  const double fp = legendre_p({arg.degree + h, arg.order, arg.t});
  const double fm = legendre_p({arg.degree - h, arg.order, arg.t});
  return (fp - fm) / (2.0 * h);
}

double legendre_p_dt_dlambda(const LegendreArg& arg) {
  const double h = 1e-6 * std::max(1.0, std::abs(arg.degree));
  const double fp = legendre_p_dt({arg.degree + h, arg.order, arg.t});
  const double fm = legendre_p_dt({arg.degree - h, arg.order, arg.t});
  return (fp - fm) / (2.0 * h);
}

double spherical_harmonic_norm(int n, int m) {
  const int am = std::abs(m);
  double ratio = 1.0;  // (n-|m|)!/(n+|m|)!
  for (int k = n - am + 1; k <= n + am; ++k) ratio /= k;
  return std::sqrt((2.0 * n + 1.0) / (4.0 * std::numbers::pi) * ratio);
}

std::complex<double> spherical_harmonic(const SphericalHarmonicIndex& idx, double theta, double phi) {
  if (idx.degree < 0 || std::abs(idx.order) > idx.degree) {
    throw DomainError("spherical_harmonic: need |m| <= n, n >= 0");
  }
  const int am = std::abs(idx.order);
  const double t = std::cos(theta);
  // Poles are fine for integer degree: evaluate the recurrence directly.
  const double p = static_cast<double>(legendre_integer(idx.degree, am, t));
  return spherical_harmonic_norm(idx.degree, idx.order) * p *
         std::polar(1.0, static_cast<double>(idx.order) * phi);
}

double wronskian_det(int n, int m, double t) {
  if (n < 2 || m < 0 || m > n - 2) throw DomainError("wronskian_det: need n - 2 >= m >= 0");
  const LegendreArg a{static_cast<double>(n), m, t};
  const LegendreArg b{static_cast<double>(n - 2), m, t};
  return legendre_p(a) * legendre_p_dt(b) - legendre_p(b) * legendre_p_dt(a);
}

double bessel_j(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(static_cast<double>(-n), x);
  return std::cyl_bessel_j(static_cast<double>(n), x);
}

double bessel_y(int n, double x) {
  if (x <= 0.0) throw DomainError("bessel_y: x must be positive");
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * std::cyl_neumann(static_cast<double>(-n), x);
  return std::cyl_neumann(static_cast<double>(n), x);
}

double bessel_j_dx(int n, double x) { return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x)); }

double bessel_y_dx(int n, double x) { return 0.5 * (bessel_y(n - 1, x) - bessel_y(n + 1, x)); }

std::complex<double> hankel1(int n, double x) { return {bessel_j(n, x), bessel_y(n, x)}; }

std::complex<double> hankel1_dx(int n, double x) { return {bessel_j_dx(n, x), bessel_y_dx(n, x)}; }

std::complex<double> cylinder_hankel0(double x) {
  if (!(x > 0.0)) throw DomainError("cylinder_hankel0: x must be > 0 (logarithmic singularity)");
  return hankel1(0, x);
}

std::complex<double> cylinder_hankel1(double x) {
  if (!(x > 0.0)) throw DomainError("cylinder_hankel1: x must be > 0");
  return hankel1(1, x);
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<size_t>(n));
  rule.weights.resize(static_cast<size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    long double p0 = 1.0L, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0L);
    const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    rule.nodes[static_cast<size_t>(i)] = static_cast<double>(-x);
    rule.nodes[static_cast<size_t>(n - 1 - i)] = static_cast<double>(x);
    rule.weights[static_cast<size_t>(i)] = static_cast<double>(w);
    rule.weights[static_cast<size_t>(n - 1 - i)] = static_cast<double>(w);
  }
  return rule;
}

}  // namespace cornerscat::specfun
