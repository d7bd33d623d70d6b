#include "cornerscat/helmholtz_series.hpp"

#include <cmath>
#include <numbers>

#include "cornerscat/errors.hpp"
#include "cornerscat/poly_cauchy.hpp"
#include "cornerscat/specfun.hpp"

namespace cornerscat {
namespace {

using cld = std::complex<long double>;

void check_k_j(double k, int J) {
  if (!(k > 0.0)) throw DomainError("expansion: k must be positive");
  if (J < 0) throw DomainError("expansion: J must be >= 0");
}

// Re and Im of (x1 + i x2)^n with integer coefficients.
std::pair<RationalPolynomial, RationalPolynomial> harmonic_pair(int n) {
  RationalPolynomial re(2, n), im(2, n);
  Rational binom(1);
  for (int j = 0; j <= n; ++j) {
    // C(n, j) x1^{n-j} (i x2)^j
    const int phase = j % 4;
    const Rational c = (phase == 0 || phase == 1) ? binom : -binom;
    if (j % 2 == 0)
      re.set({n - j, j, 0}, c);
    else
      im.set({n - j, j, 0}, c);
    binom = binom * (n - j) / (j + 1);
  }
  return {re, im};
}

HomogeneousPolynomial<ComplexRational> lift(const RationalPolynomial& p) {
  return p.convert<ComplexRational>([](const Rational& q) { return ComplexRational(q); });
}

using CPoly = HomogeneousPolynomial<ComplexRational>;

// Flattened long double copy of a complex polynomial for fast evaluation.
struct FastPoly {
  std::vector<std::pair<MultiIndex, cld>> terms;
  explicit FastPoly(const HomogeneousPolynomial<std::complex<double>>& p) {
    for (const auto& [a, c] : p.terms()) terms.emplace_back(a, cld(c.real(), c.imag()));
  }
  cld operator()(const std::array<long double, 3>& x) const {
    cld s = 0;
    for (const auto& [a, c] : terms) {
      long double m = 1;
      for (int v = 0; v < 3; ++v)
        for (int i = 0; i < a[static_cast<size_t>(v)]; ++i) m *= x[static_cast<size_t>(v)];
      s += c * m;
    }
    return s;
  }
};

cld eval2_ld(const Expansion2D& e, long double x, long double y) {
  const long double r = std::hypot(x, y);
  const long double t = std::atan2(y, x);
  cld sum = 0;
  for (int n = 0; n <= e.max_degree; ++n) {
    const long double cn = std::cos(n * t), sn = std::sin(n * t);
    const long double rn = std::pow(r, n);
    long double r2m = 1;
    for (size_t m = 0; m < e.plus[static_cast<size_t>(n)].size(); ++m) {
      const auto& cp = e.plus[static_cast<size_t>(n)][m];
      const auto& cm = e.minus[static_cast<size_t>(n)][m];
      sum += rn * r2m * (cld(cp.real(), cp.imag()) * cn + cld(cm.real(), cm.imag()) * sn);
      r2m *= r * r;
    }
  }
  return sum;
}

// The 3D expansion as one polynomial in x (exact solid harmonics, double coefficients).
HomogeneousPolynomial<std::complex<double>> expansion_degree_3d(const Expansion3D& e, int j) {
  HomogeneousPolynomial<std::complex<double>> out(3, j);
  for (const auto& [nm, coeffs] : e.a) {
    const auto [n, m] = nm;
    if (n > j || (j - n) % 2) continue;
    const size_t l = static_cast<size_t>((j - n) / 2);
    if (l >= coeffs.size() || coeffs[l] == std::complex<double>(0.0, 0.0)) continue;
    out += radial_solid_harmonic(n, m, static_cast<int>(l)).scaled(coeffs[l]);
  }
  return out;
}

std::vector<FastPoly> fast_3d(const Expansion3D& e) {
  std::vector<FastPoly> out;
  for (int j = 0; j <= e.max_degree; ++j) out.emplace_back(expansion_degree_3d(e, j));
  return out;
}

cld eval3_ld(const std::vector<FastPoly>& polys, const std::array<long double, 3>& x) {
  cld s = 0;
  for (const auto& p : polys) s += p(x);
  return s;
}

}  // namespace

std::complex<double> Expansion2D::coefficient(int n, int m, Sign s) const {
  if (n < 0 || m < 0 || n + 2 * m > max_degree) return 0.0;
  return (s == Sign::Plus ? plus : minus)[static_cast<size_t>(n)][static_cast<size_t>(m)];
}

std::complex<double> Expansion3D::coefficient(int n, int l, int m) const {
  auto it = a.find({n, m});
  if (it == a.end() || l < 0 || static_cast<size_t>(l) >= it->second.size()) return 0.0;
  return it->second[static_cast<size_t>(l)];
}

Expansion2D expand_2d(const Seeds2D& seeds, double k, int J) {
  check_k_j(k, J);
  Expansion2D e;
  e.k = k;
  e.max_degree = J;
  for (int n = 0; n <= J; ++n) {
    const size_t len = static_cast<size_t>((J - n) / 2 + 1);
    e.plus.emplace_back(len, 0.0);
    e.minus.emplace_back(len, 0.0);
  }
  for (const auto& [key, value] : seeds) {
    const auto [n, sign] = key;
    if (n < 0) throw DomainError("expand_2d: negative index");
    if (n > J || (sign == Sign::Minus && n == 0)) continue;
    auto& c = (sign == Sign::Plus ? e.plus : e.minus)[static_cast<size_t>(n)];
    c[0] = value;
    for (size_t m = 0; m + 1 < c.size(); ++m)
      c[m + 1] = -k * k / (4.0 * static_cast<double>(m + 1) * static_cast<double>(n + static_cast<int>(m) + 1)) * c[m];
  }
  return e;
}

Expansion3D expand_3d(const Seeds3D& seeds, double k, int J) {
  check_k_j(k, J);
  Expansion3D e;
  e.k = k;
  e.max_degree = J;
  for (const auto& [key, value] : seeds) {
    const auto [n, m] = key;
    if (n < 0 || std::abs(m) > n) throw DomainError("expand_3d: need |m| <= n");
    if (n > J) continue;
    std::vector<std::complex<double>> c(static_cast<size_t>((J - n) / 2 + 1), 0.0);
    c[0] = value;
    for (size_t l = 0; l + 1 < c.size(); ++l)
      c[l + 1] = -k * k / (2.0 * static_cast<double>(l + 1) * static_cast<double>(2 * l + 2 * n + 3)) * c[l];
    e.a[{n, m}] = std::move(c);
  }
  return e;
}

Seeds2D plane_wave_seeds_2d(double k, double theta_d, int J) {
  Seeds2D s;
  double mag = 1.0;  // (k/2)^n / n!
  for (int n = 0; n <= J; ++n) {
    const double eps = n == 0 ? 1.0 : 2.0;
    std::complex<double> in(1.0, 0.0);
    switch (n % 4) {
      case 1: in = {0.0, 1.0}; break;
      case 2: in = {-1.0, 0.0}; break;
      case 3: in = {0.0, -1.0}; break;
      default: break;
    }
    s[{n, Sign::Plus}] = eps * in * mag * std::cos(n * theta_d);
    if (n > 0) s[{n, Sign::Minus}] = eps * in * mag * std::sin(n * theta_d);
    mag *= k / 2.0 / (n + 1);
  }
  return s;
}

Seeds3D plane_wave_seeds_3d(double k, double theta_d, double phi_d, int J) {
  Seeds3D s;
  double mag = 1.0;  // k^n / (2n+1)!!
  for (int n = 0; n <= J; ++n) {
    std::complex<double> in(1.0, 0.0);
    switch (n % 4) {
      case 1: in = {0.0, 1.0}; break;
      case 2: in = {-1.0, 0.0}; break;
      case 3: in = {0.0, -1.0}; break;
      default: break;
    }
    for (int m = -n; m <= n; ++m) {
      const auto y = specfun::spherical_harmonic({n, m}, theta_d, phi_d);
      s[{n, m}] = 4.0 * std::numbers::pi * in * mag * std::conj(y);
    }
    mag *= k / (2.0 * n + 3.0);
  }
  return s;
}

std::complex<double> evaluate(const Expansion2D& e, double r, double theta) {
  if (r < 0.0) throw DomainError("evaluate: r must be >= 0");
  std::complex<double> sum = 0.0;
  for (int n = 0; n <= e.max_degree; ++n) {
    const double rn = std::pow(r, n);
    double r2m = 1.0;
    for (size_t m = 0; m < e.plus[static_cast<size_t>(n)].size(); ++m) {
      sum += rn * r2m *
             (e.plus[static_cast<size_t>(n)][m] * std::cos(n * theta) + e.minus[static_cast<size_t>(n)][m] * std::sin(n * theta));
      r2m *= r * r;
    }
  }
  return sum;
}

std::complex<double> evaluate(const Expansion3D& e, double r, double theta, double phi) {
  if (r < 0.0) throw DomainError("evaluate: r must be >= 0");
  std::complex<double> sum = 0.0;
  for (const auto& [nm, coeffs] : e.a) {
    const auto [n, m] = nm;
    const auto y = specfun::spherical_harmonic({n, m}, theta, phi);
    for (size_t l = 0; l < coeffs.size(); ++l) sum += std::pow(r, n + 2 * static_cast<int>(l)) * coeffs[l] * y;
  }
  return sum;
}

double helmholtz_residual(const Expansion2D& e, const std::vector<std::array<double, 2>>& points, double k) {
  const long double h = 1e-4L;
  double worst = 0.0;
  for (const auto& p : points) {
    const long double x = p[0] * std::cos(static_cast<long double>(p[1]));
    const long double y = p[0] * std::sin(static_cast<long double>(p[1]));
    const cld u = eval2_ld(e, x, y);
    const cld lap = (eval2_ld(e, x + h, y) + eval2_ld(e, x - h, y) + eval2_ld(e, x, y + h) + eval2_ld(e, x, y - h) -
                     4.0L * u) /
                    (h * h);
    const cld res = lap + static_cast<long double>(k) * static_cast<long double>(k) * u;
    worst = std::max(worst, static_cast<double>(std::abs(res)));
  }
  return worst;
}

double helmholtz_residual(const Expansion3D& e, const std::vector<std::array<double, 3>>& points, double k) {
  const auto polys = fast_3d(e);
  const long double h = 1e-4L;
  double worst = 0.0;
  for (const auto& p : points) {
    const long double r = p[0], th = p[1], ph = p[2];
    const std::array<long double, 3> x{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)};
    const cld u = eval3_ld(polys, x);
    cld lap = -6.0L * u;
    for (int v = 0; v < 3; ++v) {
      for (long double s : {h, -h}) {
        auto y = x;
        y[static_cast<size_t>(v)] += s;
        lap += eval3_ld(polys, y);
      }
    }
    lap /= h * h;
    const cld res = lap + static_cast<long double>(k) * static_cast<long double>(k) * u;
    worst = std::max(worst, static_cast<double>(std::abs(res)));
  }
  return worst;
}

std::vector<HomogeneousPolynomial<ComplexRational>> lowest_taylor_terms(const Expansion2D& e, int count) {
  if (count < 1) throw DomainError("lowest_taylor_terms: count must be >= 1");
  std::vector<CPoly> out;
  for (int j = 0; j <= e.max_degree && static_cast<int>(out.size()) < count; ++j) {
    CPoly term(2, j);
    for (int m = 0; 2 * m <= j; ++m) {
      const int n = j - 2 * m;
      const auto cp = e.coefficient(n, m, Sign::Plus);
      const auto cm = e.coefficient(n, m, Sign::Minus);
      if (cp == 0.0 && cm == 0.0) continue;
      const auto [re, im] = harmonic_pair(n);
      CPoly part = lift(re).scaled(ComplexRational::from(cp)) + lift(im).scaled(ComplexRational::from(cm));
      term += part * CPoly::radial_power(2, m);
    }
    if (!term.is_zero()) out.push_back(term);
  }
  return out;
}

std::vector<HomogeneousPolynomial<ComplexRational>> lowest_taylor_terms(const Expansion3D& e, int count) {
  if (count < 1) throw DomainError("lowest_taylor_terms: count must be >= 1");
  std::vector<CPoly> out;
  for (int j = 0; j <= e.max_degree && static_cast<int>(out.size()) < count; ++j) {
    CPoly term(3, j);
    for (const auto& [nm, coeffs] : e.a) {
      const auto [n, m] = nm;
      if (n > j || (j - n) % 2) continue;
      const size_t l = static_cast<size_t>((j - n) / 2);
      if (l >= coeffs.size() || coeffs[l] == 0.0) continue;
      const auto scale = ComplexRational::from(coeffs[l] * specfun::spherical_harmonic_norm(n, m));
      term += (legendre_solid_harmonic_exact(n, m) * CPoly::radial_power(3, static_cast<int>(l))).scaled(scale);
    }
    if (!term.is_zero()) out.push_back(term);
  }
  return out;
}

nlohmann::json to_json(const Expansion2D& e) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int n = 0; n <= e.max_degree; ++n) {
    for (size_t m = 0; m < e.plus[static_cast<size_t>(n)].size(); ++m) {
      const auto& cp = e.plus[static_cast<size_t>(n)][m];
      const auto& cm = e.minus[static_cast<size_t>(n)][m];
      coeffs.push_back({{n, static_cast<int>(m), 1}, cp.real(), cp.imag()});
      if (n > 0) coeffs.push_back({{n, static_cast<int>(m), -1}, cm.real(), cm.imag()});
    }
  }
  return {{"dimension", 2}, {"k", e.k}, {"J", e.max_degree}, {"index_order", "n,m,sign"}, {"coefficients", coeffs}};
}

nlohmann::json to_json(const Expansion3D& e) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& [nm, c] : e.a) {
    for (size_t l = 0; l < c.size(); ++l) coeffs.push_back({{nm.first, static_cast<int>(l), nm.second}, c[l].real(), c[l].imag()});
  }
  return {{"dimension", 3}, {"k", e.k}, {"J", e.max_degree}, {"index_order", "n,l,m"}, {"coefficients", coeffs}};
}

}  // namespace cornerscat
