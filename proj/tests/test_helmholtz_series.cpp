#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cornerscat/errors.hpp"
#include "cornerscat/helmholtz_series.hpp"
#include "cornerscat/specfun.hpp"

using namespace cornerscat;
using cplx = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<std::array<double, 2>> circle(double r, int n = 16) {
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i < n; ++i) pts.push_back({r, 2.0 * kPi * (i + 0.25) / n});
  return pts;
}

double plane_wave_slope(double k, int J) {
  const auto e = expand_2d(plane_wave_seeds_2d(k, 0.3, J), k, J);
  return std::log2(helmholtz_residual(e, circle(0.2), k) / helmholtz_residual(e, circle(0.1), k));
}
}  // namespace

TEST_CASE("expand_2d recurrence examples") {
  const double k = 1.7;
  const auto e = expand_2d({{{0, Sign::Plus}, 1.0}}, k, 2);
  CHECK(std::abs(e.coefficient(0, 1, Sign::Plus) + k * k / 4) < 1e-15);
  const auto f = expand_2d({{{1, Sign::Plus}, 1.0}}, 2.0, 5);
  CHECK(f.coefficient(1, 1, Sign::Plus) == cplx(-0.5));
  CHECK(std::abs(f.coefficient(1, 2, Sign::Plus) - 1.0 / 12) < 1e-16);
  CHECK(f.coefficient(1, 1, Sign::Minus) == 0.0);
  const auto z = expand_2d({}, 3.0, 6);
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; n + 2 * m <= 6; ++m) CHECK(z.coefficient(n, m, Sign::Plus) == 0.0);
  const auto ignored = expand_2d({{{9, Sign::Plus}, 1.0}}, 1.0, 4);
  CHECK(evaluate(ignored, 0.3, 0.2) == 0.0);
  CHECK(expand_2d({{{0, Sign::Minus}, 1.0}}, 1.0, 4).coefficient(0, 0, Sign::Minus) == 0.0);
}

TEST_CASE("expand_3d recurrence examples") {
  const auto e = expand_3d({{{0, 0}, 1.0}}, 1.0, 4);
  CHECK(std::abs(e.coefficient(0, 1, 0) + 1.0 / 6) < 1e-16);
  const auto f = expand_3d({{{1, 1}, 1.0}}, 1.0, 3);
  CHECK(std::abs(f.coefficient(1, 1, 1) + 1.0 / 10) < 1e-16);
  CHECK(evaluate(expand_3d({}, 2.0, 5), 0.3, 0.4, 0.5) == 0.0);
  CHECK_THROWS_AS(expand_3d({{{1, 2}, 1.0}}, 1.0, 3), DomainError);
}

TEST_CASE("property: 3D recurrence closure") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Seeds3D seeds;
  for (int n = 0; n <= 5; ++n)
    for (int m = -n; m <= n; ++m) seeds[{n, m}] = {u(rng), u(rng)};
  const double k = 2.0;
  const auto e = expand_3d(seeds, k, 11);
  for (const auto& [nm, a] : e.a) {
    const int n = nm.first;
    for (size_t l = 0; l + 1 < a.size(); ++l) {
      const double c = 2.0 * static_cast<double>(l + 1) * static_cast<double>(2 * l + 2 * n + 3);
      CHECK(std::abs(c * a[l + 1] + k * k * a[l]) <= 1e-14 * std::abs(a[l]) * k * k);
    }
  }
}

TEST_CASE("evaluate: J0 and plane waves") {
  const double k = 1.0;
  Seeds2D j0{{{0, Sign::Plus}, 1.0}};
  const auto e = expand_2d(j0, k, 14);
  CHECK(evaluate(e, 0.0, 1.1) == cplx(1.0));
  for (double r : {0.1, 0.2, 0.3}) CHECK(std::abs(evaluate(e, r, 0.4) - std::cyl_bessel_j(0.0, k * r)) < 1e-14);
  CHECK(helmholtz_residual(e, circle(0.3), k) <= 1e-8);
  CHECK(helmholtz_residual(e, circle(0.15), k) <= 1e-8);
  CHECK(helmholtz_residual(expand_2d({}, 1.0, 5), circle(0.3), 1.0) == 0.0);

  const double td = 0.9;
  const auto pw = expand_2d(plane_wave_seeds_2d(1.0, td, 12), 1.0, 12);
  const double r = 0.3, th = 0.7;
  const cplx exact = std::exp(cplx(0.0, r * std::cos(th - td)));
  CHECK(std::abs(evaluate(pw, r, th) - exact) < 1e-9);

  const double k3 = 1.3, tdir = 0.8, pdir = 2.1;
  const auto pw3 = expand_3d(plane_wave_seeds_3d(k3, tdir, pdir, 16), k3, 16);
  const double rr = 0.3, t = 1.2, p = -0.4;
  const double dot = std::sin(t) * std::sin(tdir) * std::cos(p - pdir) + std::cos(t) * std::cos(tdir);
  CHECK(std::abs(evaluate(pw3, rr, t, p) - std::exp(cplx(0.0, k3 * rr * dot))) < 1e-9);
  CHECK(helmholtz_residual(pw3, {{0.2, 0.5, 0.3}, {0.3, 2.0, -1.0}}, k3) <= 1e-6);
}

TEST_CASE("helmholtz_residual decays like r^(J-1)") {
  CHECK(plane_wave_slope(15.0, 8) == doctest::Approx(7.0).epsilon(0.3 / 7.0));
  CHECK(plane_wave_slope(15.0, 12) == doctest::Approx(11.0).epsilon(0.3 / 11.0));
  CHECK(plane_wave_slope(5.0, 8) == doctest::Approx(7.0).epsilon(0.3 / 7.0));
}

TEST_CASE("lowest_taylor_terms") {
  const auto m3 = expand_2d({{{3, Sign::Plus}, 2.0}, {{3, Sign::Minus}, cplx(0.0, 1.0)}, {{4, Sign::Plus}, 0.5}}, 2.0, 8);
  const auto t = lowest_taylor_terms(m3, 3);
  REQUIRE(t.size() == 3);
  CHECK(t[0].degree() == 3);
  CHECK(t[0].laplacian().is_zero());
  CHECK(t[1].degree() == 4);
  CHECK(t[1].laplacian().is_zero());
  CHECK_FALSE(t[2].laplacian().is_zero());
  const double th = 0.35;
  const cplx f3 = 2.0 * std::cos(3 * th) + cplx(0.0, 1.0) * std::sin(3 * th);
  CHECK(std::abs(t[0].evaluate({std::cos(th), std::sin(th), 0.0}) - f3) < 1e-14);

  const auto j0 = lowest_taylor_terms(expand_2d({{{0, Sign::Plus}, 1.0}}, 1.0, 6), 2);
  REQUIRE(j0.size() == 2);
  CHECK(j0[0].degree() == 0);
  CHECK(j0[1].degree() == 2);
  CHECK(j0[0].laplacian().is_zero());
  CHECK_FALSE(j0[1].laplacian().is_zero());

  const auto y = lowest_taylor_terms(expand_3d({{{2, 1}, 1.0}}, 1.0, 4), 1);
  REQUIRE(y.size() == 1);
  CHECK(y[0].degree() == 2);
  CHECK(y[0].laplacian().is_zero());
  const double r = 0.6, tt = 0.9, pp = 0.4;
  const std::array<double, 3> x{r * std::sin(tt) * std::cos(pp), r * std::sin(tt) * std::sin(pp), r * std::cos(tt)};
  CHECK(std::abs(y[0].evaluate(x) - r * r * specfun::spherical_harmonic({2, 1}, tt, pp)) < 1e-13);

  CHECK(lowest_taylor_terms(expand_2d({}, 1.0, 4), 2).empty());
  CHECK_THROWS_AS(lowest_taylor_terms(expand_2d({}, 1.0, 4), 0), DomainError);
}

TEST_CASE("property: degree-M and M+1 terms are harmonic") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> order(0, 5);
  std::uniform_real_distribution<double> kd(0.5, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int M = order(rng);
    const double k = kd(rng);
    const int J = M + 4;
    Seeds2D s2;
    Seeds3D s3;
    for (int n = M; n <= J; ++n) {
      s2[{n, Sign::Plus}] = {u(rng), u(rng)};
      if (n > 0) s2[{n, Sign::Minus}] = {u(rng), u(rng)};
      for (int m = -n; m <= n; ++m) s3[{n, m}] = {u(rng), u(rng)};
    }
    for (const auto& terms : {lowest_taylor_terms(expand_2d(s2, k, J), 2), lowest_taylor_terms(expand_3d(s3, k, J), 2)}) {
      REQUIRE(terms.size() == 2);
      CHECK(terms[0].degree() == M);
      CHECK(terms[1].degree() == M + 1);
      CHECK(terms[0].laplacian().is_zero());
      CHECK(terms[1].laplacian().is_zero());
    }
  }
}

TEST_CASE("property: evaluation is linear") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Seeds2D a, b, c;
  const cplx alpha(0.7, -0.2), beta(-1.3, 0.4);
  for (int n = 0; n <= 6; ++n)
    for (auto s : {Sign::Plus, Sign::Minus}) {
      if (n == 0 && s == Sign::Minus) continue;
      a[{n, s}] = {u(rng), u(rng)};
      b[{n, s}] = {u(rng), u(rng)};
      c[{n, s}] = alpha * a[{n, s}] + beta * b[{n, s}];
    }
  const auto ea = expand_2d(a, 2.0, 10), eb = expand_2d(b, 2.0, 10), ec = expand_2d(c, 2.0, 10);
  for (int i = 0; i < 20; ++i) {
    const double r = 0.5 * std::abs(u(rng)), th = kPi * u(rng);
    CHECK(std::abs(evaluate(ec, r, th) - (alpha * evaluate(ea, r, th) + beta * evaluate(eb, r, th))) < 1e-12);
  }
}

TEST_CASE("expansion JSON") {
  const auto e = expand_2d({{{1, Sign::Plus}, 1.0}}, 2.0, 3);
  const auto j = to_json(e);
  CHECK(j["k"] == 2.0);
  CHECK(j["J"] == 3);
  bool found = false;
  for (const auto& c : j["coefficients"])
    if (c[0] == nlohmann::json({1, 1, 1})) {
      CHECK(c[1] == -0.5);
      found = true;
    }
  CHECK(found);
  const auto j3 = to_json(expand_3d({{{0, 0}, 1.0}}, 1.0, 2));
  CHECK(j3["J"] == 2);
  CHECK(j3["coefficients"].size() >= 2);
}
