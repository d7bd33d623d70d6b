// One line per acceptance criterion; exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cornerscat/cone_spectrum.hpp"
#include "cornerscat/errors.hpp"
#include "cornerscat/helmholtz_series.hpp"
#include "cornerscat/poly_cauchy.hpp"
#include "cornerscat/scatter2d.hpp"
#include "cornerscat/specfun.hpp"

using namespace cornerscat;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// P_n^m(t) = (1 - t^2)^{m/2} d^m/dt^m P_n(t) from the explicit coefficients of P_n.
long double legendre_closed_form(int n, int m, long double t) {
  long double sum = 0.0L;
  for (int k = 0; 2 * k <= n - m; ++k) {
    long double c = (k % 2 ? -1.0L : 1.0L) / std::pow(2.0L, n);
    for (int j = 1; j <= 2 * n - 2 * k; ++j) c *= j;
    for (int j = 1; j <= k; ++j) c /= j;
    for (int j = 1; j <= n - k; ++j) c /= j;
    for (int j = 1; j <= n - 2 * k - m; ++j) c /= j;
    sum += c * std::pow(t, n - 2 * k - m);
  }
  return sum * std::pow(1.0L - t * t, m / 2.0L);
}

Outcome legendre() {
  Outcome o;
  double worst = 0.0;
  for (int n = 0; n <= 12; ++n)
    for (int m = 0; m <= n; ++m)
      for (int i = 0; i < 50; ++i) {
        const double t = -0.98 + 1.96 * i / 49.0;
        const long double ref = legendre_closed_form(n, m, t);
        const double got = specfun::legendre_p({static_cast<double>(n), m, t});
        worst = std::max(worst, static_cast<double>(std::abs((got - ref) / ref)));
      }
  require(o, worst <= 1e-12, fmt("closed-form relative error %.2e", worst));
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> lam(-5.0, 5.0), tt(-0.95, 0.95);
  std::uniform_int_distribution<int> mm(0, 3);
  double refl = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double l = lam(rng), t = tt(rng);
    const int m = mm(rng);
    const double a = specfun::legendre_p({l, m, t}), b = specfun::legendre_p({-l - 1.0, m, t});
    refl = std::max(refl, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  require(o, refl <= 1e-10, fmt("reflection mismatch %.2e", refl));
  o.detail = o.pass ? fmt("closed forms %.1e, reflection %.1e", worst, refl) : o.detail;
  return o;
}

Outcome cone_spectrum() {
  Outcome o;
  const auto hs = cone_exponents(ConeGeometry::from_pi_fraction(1, 2), BoundaryCondition::Dirichlet, 6.0, 0);
  std::vector<double> pos;
  for (const auto& e : hs)
    if (e.value > 0.0) pos.push_back(e.value);
  require(o, pos.size() == 3, "half-space m=0 count");
  for (size_t i = 0; i < pos.size(); ++i)
    require(o, std::abs(pos[i] - (2.0 * i + 1.0)) <= 1e-9, fmt("half-space exponent %.15g", pos[i]));
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const double w = kPi * (i + 0.5) / 20.0 + 1e-3;
    if (std::abs(w - kPi / 2) < 1e-6) continue;
    const auto g = ConeGeometry::from_radians(w);
    require(o, no_exponent_equals_one(g), fmt("lambda = 1 at omega %.6f", w));
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
      const auto ex = cone_exponents(g, bc, 5.0);
      for (const auto& e : ex) {
        require(o, std::abs(e.value - 1.0) > 1e-6, fmt("lambda = 1 listed at omega %.6f", w));
        const bool partner = std::any_of(ex.begin(), ex.end(), [&](const SingularExponent& f) {
          return std::abs(f.value + e.value + 1.0) <= 1e-9 * std::max(1.0, std::abs(e.value));
        });
        require(o, partner || std::abs(-e.value - 1.0) > 5.0, fmt("reflection partner of %.12g missing", e.value));
      }
    }
    ++checked;
  }
  if (o.pass) o.detail = "{1,3,5} and " + std::to_string(checked) + " angles without lambda = 1";
  return o;
}

Outcome wronskian() {
  Outcome o;
  int cases = 0;
  for (int n = 2; n <= 10; ++n)
    for (int m = 0; m <= n - 2; ++m) {
      std::vector<double> t(200), w(200);
      for (int i = 0; i < 200; ++i) {
        t[i] = -1.0 + (i + 0.5) * 2.0 / 200.0;
        w[i] = specfun::wronskian_det(n, m, t[i]);
      }
      int changes = 0;
      double where = 0.0;
      for (int i = 0; i + 1 < 200; ++i)
        if ((w[i] > 0) != (w[i + 1] > 0)) {
          ++changes;
          where = 0.5 * (t[i] + t[i + 1]);
        }
      require(o, changes == 1, fmt("n=%g m=%g: %g sign changes", n, m, changes));
      require(o, std::abs(where) <= 0.01, fmt("n=%g m=%g: sign change at %.3f", n, m, where));
      for (int i = 0; i < 200; ++i)
        if (std::abs(t[i]) >= 0.01) require(o, w[i] != 0.0 && std::isfinite(w[i]), fmt("n=%g m=%g: zero at %.3f", n, m, t[i]));
      ++cases;
    }
  if (o.pass) o.detail = std::to_string(cases) + " (n, m) pairs, one sign change at t = 0";
  return o;
}

Outcome nullspaces() {
  Outcome o;
  NullspaceOptions interval;
  interval.force_interval = true;
  int solved = 0;
  const std::pair<long, long> sectors[] = {{1, 3}, {1, 2}, {2, 3}, {4, 3}, {3, 2}};
  for (const auto& [num, den] : sectors)
    for (int d = 2; d <= 10; ++d) {
      const auto g = SectorGeometry::from_pi_fraction(num, den);
      const auto ex = cauchy_nullspace(g, d);
      const auto iv = cauchy_nullspace(g, d, interval);
      require(o, ex.basis.empty() && iv.basis.empty() && iv.certified, fmt("sector %g/%g pi degree %g", num, den, d));
      ++solved;
    }
  const std::pair<long, long> cones[] = {{1, 4}, {1, 3}, {2, 3}};  // half-angles for 2w = pi/2, 2pi/3, 4pi/3
  for (const auto& [num, den] : cones)
    for (int d = 2; d <= 8; ++d) {
      const auto g = ConeGeometry::from_pi_fraction(num, den);
      const auto ex = cauchy_nullspace(g, d);
      const auto iv = cauchy_nullspace(g, d, interval);
      require(o, ex.basis.empty() && iv.basis.empty() && iv.certified, fmt("cone %g/%g pi degree %g", num, den, d));
      ++solved;
    }
  const auto half = cauchy_nullspace(SectorGeometry::from_pi_fraction(1, 1), 2);
  const bool x2sq = half.basis.size() == 1 && half.basis[0].terms().size() == 1 &&
                    half.basis[0].terms().begin()->first == MultiIndex{0, 2, 0};
  require(o, x2sq, "half-plane control is not spanned by x2^2");
  if (o.pass) o.detail = std::to_string(solved) + " exact + interval certificates, x2^2 control";
  return o;
}

Outcome harmonicity() {
  Outcome o;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0), kd(0.5, 5.0);
  std::uniform_int_distribution<int> md(0, 5);
  double worst = 0.0;
  auto ring2 = [](double r) {
    std::vector<std::array<double, 2>> p;
    for (int i = 0; i < 16; ++i) p.push_back({r, 2.0 * kPi * (i + 0.25) / 16});
    return p;
  };
  auto ring3 = [](double r) {
    std::vector<std::array<double, 3>> p;
    for (int i = 0; i < 16; ++i) p.push_back({r, 0.3 + 0.15 * i, 0.4 * i});
    return p;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const int M = md(rng);
    const double k = kd(rng);
    const bool three = trial % 2 == 1;
    // harmonicity: random seeds at every degree n >= M
    const int J = M + 5;
    Seeds2D s2;
    Seeds3D s3;
    for (int n = M; n <= J; ++n) {
      if (three) {
        for (int m = -n; m <= n; ++m) s3[{n, m}] = {u(rng), u(rng)};
      } else {
        s2[{n, Sign::Plus}] = {u(rng), u(rng)};
        if (n > 0) s2[{n, Sign::Minus}] = {u(rng), u(rng)};
      }
    }
    const auto terms = three ? lowest_taylor_terms(expand_3d(s3, k, J), 2) : lowest_taylor_terms(expand_2d(s2, k, J), 2);
    require(o, terms.size() == 2 && terms[0].degree() == M && terms[1].degree() == M + 1, "lowest degrees");
    for (const auto& t : terms) require(o, t.laplacian().is_zero(), fmt("trial %g: nonzero Laplacian", trial));

    // decay: seeds of the parity of M only
    const int Jd = M + 3;
    Seeds2D d2;
    Seeds3D d3;
    for (int n = M; n < Jd; n += 2) {
      if (three) {
        for (int m = -n; m <= n; ++m) d3[{n, m}] = {u(rng), u(rng)};
      } else {
        d2[{n, Sign::Plus}] = {u(rng), u(rng)};
        if (n > 0) d2[{n, Sign::Minus}] = {u(rng), u(rng)};
      }
    }
    double r1, r2;
    if (three) {
      const auto e = expand_3d(d3, k, Jd);
      r1 = helmholtz_residual(e, ring3(0.2), k);
      r2 = helmholtz_residual(e, ring3(0.4), k);
    } else {
      const auto e = expand_2d(d2, k, Jd);
      r1 = helmholtz_residual(e, ring2(0.2), k);
      r2 = helmholtz_residual(e, ring2(0.4), k);
    }
    const double slope = std::log2(r2 / r1);
    worst = std::max(worst, std::abs(slope - (Jd - 1)));
  }
  require(o, worst <= 0.3, fmt("log-log slope off by %.3f", worst));
  if (o.pass) o.detail = fmt("200 expansions, slope deviation %.3f", worst);
  return o;
}

Outcome special_solutions() {
  Outcome o;
  int cases = 0, exact = 0, resonant = 0;
  for (long den = 1; den <= 9; ++den)
    for (long num = 1; num < 2 * den; ++num) {
      if (num == den || std::gcd(num, den) != 1) continue;
      const auto g = SectorGeometry::from_pi_fraction(num, den);
      const bool has_dir = exact_direction(*g.exact).has_value();
      for (int kappa = 0; kappa <= 4; ++kappa) {
        RationalPolynomial p(2, kappa);
        for (int a = 0; a <= kappa; ++a) p.add_to({a, kappa - a, 0}, Rational(a + 1, kappa + 2));
        const bool expected = ((kappa + 2) * num) % den == 0;
        for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
          const auto s = special_solution_2d(p, g, bc);
          const auto r = verify_special_solution(s, p, g, bc);
          require(o, s.resonant == expected, fmt("resonance flag at %g/%g pi, kappa %g", num, den, kappa));
          require(o, r.exact_pde, fmt("Laplacian mismatch at %g/%g pi, kappa %g", num, den, kappa));
          if (!s.resonant && has_dir) {
            require(o, r.exact_boundary, fmt("boundary not exact at %g/%g pi, kappa %g", num, den, kappa));
            ++exact;
          } else if (!s.resonant) {
            require(o, r.boundary_condition <= 1e-9, fmt("boundary residual at %g/%g pi, kappa %g", num, den, kappa));
          }
          resonant += s.resonant;
          ++cases;
        }
      }
    }
  require(o, cases >= 500, "grid smaller than 500 cases");
  const auto cone = ConeGeometry::from_radians(1.1);
  for (int kappa = 0; kappa <= 6; ++kappa)
    for (int n = kappa % 2; n <= kappa; n += 2) {
      const auto s = special_solution_cone({{n, 0, 1.0}}, kappa, cone, BoundaryCondition::Dirichlet);
      const Rational zeta(1, (kappa + 2) * (kappa + 3) - n * (n + 1));
      require(o, s.components.size() == 1 && s.components[0].zeta == zeta, fmt("zeta kappa %g n %g", kappa, n));
    }
  if (o.pass)
    o.detail = std::to_string(cases) + " cases (" + std::to_string(resonant) + " resonant, " + std::to_string(exact) +
               " exact boundary), zeta exact";
  return o;
}

Outcome solver_oracle() {
  Outcome o;
  const auto oracle = disk_oracle(0.5, 2.0, 3.0, 0.0);
  double err[2];
  int i = 0;
  for (int N : {256, 512}) {
    const auto c = make_contrast(make_disk(0.5), Profile{}, N, 0.55);
    const auto f = far_field(c, solve(c, 3.0, IncidentField::plane(0.0)));
    err[i++] = l2_distance(f, oracle.far) / oracle.far.l2_norm;
  }
  require(o, err[0] <= 1e-3, fmt("N=256 error %.2e", err[0]));
  require(o, err[1] <= err[0] / 2.0, fmt("N=512 error %.2e vs %.2e", err[1], err[0]));
  if (o.pass) o.detail = fmt("N=256 %.2e, N=512 %.2e", err[0], err[1]);
  return o;
}

Outcome identities() {
  Outcome o;
  struct SceneCase {
    Shape shape;
    int N;
    double L, k;
  };
  const SceneCase cases[] = {{make_disk(0.5), 256, 0.55, 3.0}, {make_square(1.0), 128, 0.6, 5.0}};
  double ot = 0.0, rec = 0.0;
  for (const auto& sc : cases) {
    const auto c = make_contrast(sc.shape, Profile{}, sc.N, sc.L);
    for (double d : {0.0, 0.9}) {
      const auto t = solve(c, sc.k, IncidentField::plane(d));
      ot = std::max(ot, optical_theorem_residual(far_field(c, t), far_field_at(c, t, d)));
    }
    for (const auto& [a, b] : {std::pair{0.0, 1.0}, std::pair{0.4, 2.7}, std::pair{-1.3, 3.9}})
      rec = std::max(rec, reciprocity_mismatch(c, sc.k, a, b));
  }
  require(o, ot <= 1e-5, fmt("optical theorem %.2e", ot));
  require(o, rec <= 1e-6, fmt("reciprocity %.2e", rec));
  if (o.pass) o.detail = fmt("optical theorem %.1e, reciprocity %.1e", ot, rec);
  return o;
}

Outcome witness() {
  Outcome o;
  const auto sq = make_contrast(make_square(1.0), Profile{}, 128, 0.6);
  const auto entries = sweep(sq, IncidentField::plane(0.0), 1.0, 10.0, 50);
  double margin = 1e300;
  for (const auto& e : entries) {
    require(o, !e.failed, fmt("solver failure at k = %.4f", e.k));
    require(o, !e.flagged, fmt("flagged k = %.4f", e.k));
    if (!e.failed) margin = std::min(margin, e.norm / e.floor);
  }
  const auto tri = make_contrast(make_triangle(0.5), Profile{}, 128, 0.6);
  const auto inc = IncidentField::plane(0.0);
  const auto fs = far_field(sq, solve(sq, 5.0, inc));
  const auto ft = far_field(tri, solve(tri, 5.0, inc));
  const double floor = calibrated_floor(sq, 5.0);
  const double dist = l2_distance(fs, ft);
  require(o, dist > 10.0 * floor, fmt("square vs triangle %.2e <= 10 x floor %.2e", dist, floor));
  if (o.pass) o.detail = fmt("min norm/floor %.0f over 50 k, shape distance/floor %.0f", margin, dist / floor);
  return o;
}

Outcome flat_interface() {
  Outcome o;
  const std::complex<double> I(0.0, 1.0);
  double worst = 0.0;
  const std::pair<double, double> pairs[] = {{2.0, 1.0}, {4.0, 1.0}, {0.5, 1.0}, {2.0, 3.0}};
  for (const auto& [q0, k] : pairs) {
    std::vector<BoundarySample> arc;
    for (int i = 0; i < 21; ++i) arc.push_back({{-1.0 + 0.1 * i, 0.0}, {0.0, 1.0}});
    const double q = q0, kk = k;
    auto u1 = [=](const Point2& x) { return std::exp(-I * kk * x[1]) + (1.0 - q) / (1.0 + q) * std::exp(I * kk * x[1]); };
    auto u2 = [=](const Point2& x) { return 2.0 / (1.0 + q) * std::exp(-I * kk * q * x[1]); };
    const auto r = transmission_residual(u1, u2, arc, 1);
    worst = std::max({worst, r[0], r[1]});
  }
  require(o, worst < 1e-6, fmt("orders 0/1 residual %.2e", worst));
  if (o.pass) o.detail = fmt("orders 0 and 1 residual %.1e", worst);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"legendre correctness", legendre},
      {"cone spectrum", cone_spectrum},
      {"wronskian sign change", wronskian},
      {"cauchy null spaces", nullspaces},
      {"taylor-term harmonicity and decay", harmonicity},
      {"special solutions", special_solutions},
      {"solver vs disk oracle", solver_oracle},
      {"optical theorem and reciprocity", identities},
      {"no non-scattering wavenumbers", witness},
      {"flat-interface pair", flat_interface},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str(), s);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures;
}
