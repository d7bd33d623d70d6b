#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cornerscat/cone_spectrum.hpp"
#include "cornerscat/errors.hpp"
#include "cornerscat/specfun.hpp"

using namespace cornerscat;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr auto D = BoundaryCondition::Dirichlet;
constexpr auto N = BoundaryCondition::Neumann;

std::vector<double> positive(const std::vector<SingularExponent>& e) {
  std::vector<double> out;
  for (const auto& x : e)
    if (x.value > 0) out.push_back(x.value);
  return out;
}

bool contains(const std::vector<SingularExponent>& e, double v, double tol = 1e-9) {
  return std::any_of(e.begin(), e.end(), [&](const SingularExponent& x) { return std::abs(x.value - v) <= tol; });
}
}  // namespace

TEST_CASE("geometry validation and exclusion flags") {
  CHECK_THROWS_AS(SectorGeometry::from_radians(0.0), DomainError);
  CHECK_THROWS_AS(SectorGeometry::from_radians(2 * kPi), DomainError);
  CHECK_THROWS_AS(ConeGeometry::from_radians(kPi), DomainError);
  CHECK(SectorGeometry::from_radians(kPi).is_excluded());
  CHECK(SectorGeometry::from_pi_fraction(2, 2).is_excluded());
  CHECK_FALSE(SectorGeometry::from_radians(kPi + 1e-9).is_excluded());
  CHECK(ConeGeometry::from_pi_fraction(1, 2).is_excluded());
  CHECK_FALSE(ConeGeometry::from_pi_fraction(1, 3).is_excluded());
}

TEST_CASE("sector_exponents") {
  const auto q = SectorGeometry::from_pi_fraction(1, 2);
  const auto d = sector_exponents(q, D, 7.0);
  CHECK(positive(d) == std::vector<double>{2.0, 4.0, 6.0});
  CHECK(d.size() == 6);
  CHECK(std::is_sorted(d.begin(), d.end(), [](auto& a, auto& b) { return a.value < b.value; }));
  const auto wide = positive(sector_exponents(SectorGeometry::from_pi_fraction(3, 2), D, 2.1));
  REQUIRE(wide.size() == 3);
  CHECK(wide[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(wide[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(wide[2] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(contains(sector_exponents(q, N, 3.0), 0.0, 0.0));
  CHECK_FALSE(contains(sector_exponents(q, D, 3.0), 0.0, 0.0));
  CHECK_THROWS_AS(sector_exponents(q, D, 0.0), DomainError);
}

TEST_CASE("property: doubling the sector opening halves every exponent") {
  for (double w : {0.4, 1.1, 2.3}) {
    const auto a = sector_exponents(SectorGeometry::from_radians(w), D, 20.0);
    const auto b = sector_exponents(SectorGeometry::from_radians(2 * w), D, 10.0);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(b[i].value == doctest::Approx(a[i].value / 2).epsilon(1e-15));
  }
}

TEST_CASE("cone_exponents: half-space m = 0 Dirichlet exponents are the odd integers") {
  const auto e = cone_exponents(ConeGeometry::from_radians(kPi / 2), D, 6.0, 0);
  const auto p = positive(e);
  REQUIRE(p.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(std::abs(p[i] - (2.0 * i + 1.0)) < 1e-9);
}

TEST_CASE("cone_exponents match independent root values") {
  // mpmath roots (tests/oracles/generate.py)
  CHECK(contains(cone_exponents(ConeGeometry::from_pi_fraction(1, 4), D, 3.0, 0), 2.5478991926671829453));
  CHECK(contains(cone_exponents(ConeGeometry::from_pi_fraction(1, 3), N, 2.0, 1), 1.467987383575463652));
}

TEST_CASE("cone_exponents: Neumann always contains 0 and -1") {
  for (double w : {0.3, 1.0, 2.0, 2.8}) {
    const auto e = cone_exponents(ConeGeometry::from_radians(w), N, 3.0);
    CHECK(contains(e, 0.0));
    CHECK(contains(e, -1.0));
  }
}

TEST_CASE("cone_exponents: coinciding Dirichlet and Neumann exponent") {
  // P_2'(cos w) = 0 forces P_2^1(cos w) = 0: lambda = 2 is in both lists.
  const auto g = ConeGeometry::from_radians(kPi / 2);
  CHECK(contains(cone_exponents(g, D, 3.0), 2.0));
  CHECK(contains(cone_exponents(g, N, 3.0), 2.0));
  // P_2(cos w) = 0 alone gives a Dirichlet exponent only.
  const auto h = ConeGeometry::from_radians(std::acos(1.0 / std::sqrt(3.0)));
  CHECK(contains(cone_exponents(h, D, 3.0), 2.0));
  CHECK_FALSE(contains(cone_exponents(h, N, 3.0), 2.0));
}

TEST_CASE("property: cone exponents are certified roots with reflection partners") {
  for (double w : {0.4, 1.2, 2.2}) {
    const auto g = ConeGeometry::from_radians(w);
    for (auto bc : {D, N}) {
      const auto e = cone_exponents(g, bc, 6.0);
      for (const auto& x : e) {
        CAPTURE(x.value);
        CHECK(contains(e, -x.value - 1.0));
        for (int m : x.orders) {
          auto f = [&](double lam) {
            const specfun::LegendreArg a{lam, m, std::cos(w)};
            return bc == D ? specfun::legendre_p(a) : specfun::legendre_p_dt(a);
          };
          // certificate relative to the function's size on the scan window
          double scale = 1.0;
          for (double lam = -0.5; lam <= 6.05; lam += 0.05) scale = std::max(scale, std::abs(f(lam + 1.234567e-4)));
          const double root = x.value > -0.5 ? x.value : -x.value - 1.0;
          CHECK(std::abs(f(root)) <= 1e-10 * scale);
          const double lo = f(root - 1e-6), hi = f(root + 1e-6);
          CHECK(lo * hi < 0.0);
        }
      }
      const auto p = positive(cone_exponents(g, D, 6.0));
      REQUIRE_FALSE(p.empty());
      CHECK(p.front() > 0.0);
    }
  }
}

TEST_CASE("property: angular eigenfunctions solve the Beltrami problem") {
  const auto g = ConeGeometry::from_radians(1.1);
  for (auto bc : {D, N}) {
    for (const auto& x : cone_exponents(g, bc, 4.0)) {
      if (x.value < 0) continue;
      for (int m : x.orders) {
        AngularEigenfunction f(x, 3, m);
        CHECK(f.eigen_residual(g.omega) <= 1e-8);
        CHECK(f.boundary_residual(g.omega) <= 1e-8);
      }
    }
  }
}

TEST_CASE("no_exponent_equals_one") {
  CHECK(no_exponent_equals_one(ConeGeometry::from_pi_fraction(1, 3)));
  CHECK_FALSE(no_exponent_equals_one(ConeGeometry::from_pi_fraction(1, 2)));
  CHECK(no_exponent_equals_one(ConeGeometry::from_radians(2.0)));
  for (int i = 1; i <= 20; ++i) {
    const double w = kPi * i / 21.0;
    const auto g = ConeGeometry::from_radians(w);
    for (auto bc : {D, N}) CHECK_FALSE(contains(cone_exponents(g, bc, 2.0), 1.0, 1e-6));
  }
}

TEST_CASE("sobolev_isomorphism") {
  CHECK(sobolev_isomorphism(SectorGeometry::from_pi_fraction(1, 2), D, 0.0));
  CHECK_FALSE(sobolev_isomorphism(SectorGeometry::from_pi_fraction(1, 2), N, 1.0));
  for (double w : {0.5, 1.3, 2.6}) CHECK(sobolev_isomorphism(ConeGeometry::from_radians(w), D, -0.5));
}

TEST_CASE("holder_isomorphism") {
  CHECK(holder_isomorphism(SectorGeometry::from_pi_fraction(2, 3), D, 1.0, 0.1));
  for (double a : {0.05, 0.3, 0.7, 0.95}) CHECK(holder_isomorphism(SectorGeometry::from_pi_fraction(1, 2), D, 1.0, a));
  // cone angle whose first Dirichlet exponent is 2.31 (tests/oracles/generate.py)
  const auto g = ConeGeometry::from_radians(0.85118264364535932821);
  CHECK(contains(cone_exponents(g, D, 3.0, 0), 2.31));
  CHECK_FALSE(holder_isomorphism(g, D, 0.0, 0.31));
  CHECK(holder_isomorphism(g, D, 0.0, 0.2));
}

TEST_CASE("asymptotic_terms") {
  auto values = [](const std::vector<AngularEigenfunction>& t) {
    std::vector<double> v;
    for (const auto& f : t) v.push_back(f.exponent().value);
    return v;
  };
  const auto a = values(asymptotic_terms(SectorGeometry::from_pi_fraction(3, 2), D, 1.0, 0.0, 0.1));
  REQUIRE(a.size() == 2);
  CHECK(a[0] == doctest::Approx(4.0 / 3.0));
  CHECK(a[1] == doctest::Approx(2.0));
  CHECK(values(asymptotic_terms(SectorGeometry::from_pi_fraction(1, 2), D, 1.0, 0.0, 0.1)) == std::vector<double>{2.0});
  CHECK_THROWS_AS(asymptotic_terms(SectorGeometry::from_pi_fraction(1, 2), D, 1.0, 1.0, 0.1), DomainError);
  const auto s = asymptotic_terms(SectorGeometry::from_pi_fraction(1, 2), D, 1.0, 0.0, 0.1);
  CHECK(std::abs(s[0](kPi / 2)) < 1e-15);
}

TEST_CASE("admissible_alpha keeps (2, 2 + alpha) free of exponents") {
  const auto g = ConeGeometry::from_radians(0.85118264364535932821);
  const double a = admissible_alpha(g, 0.9);
  CHECK(a > 0.0);
  for (auto bc : {D, N})
    for (const auto& x : cone_exponents(g, bc, 4.0)) CHECK_FALSE((x.value > 2.0 && x.value < 2.0 + a));
}

TEST_CASE("exponent CSV") {
  std::ostringstream os;
  write_exponent_csv(os, sector_exponents(SectorGeometry::from_pi_fraction(1, 2), D, 4.0));
  CHECK(os.str().rfind("kind,lambda,index,multiplicity,residual\n", 0) == 0);
}
