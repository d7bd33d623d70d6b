#pragma once

// Local series of Helmholtz solutions around the origin:
//   2D  u = sum_{n,m} r^{n+2m} (c+_{n,m} cos n theta + c-_{n,m} sin n theta)
//   3D  u = sum_{n,l,m} r^{n+2l} a^{(l)}_{n,m} Y_n^m
// with the coefficients in m (resp. l) fixed by the Helmholtz recurrence.

#include <array>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cornerscat/exact.hpp"
#include "cornerscat/polynomial.hpp"

namespace cornerscat {

enum class Sign { Plus, Minus };

struct Expansion2D {
  double k = 1.0;
  int max_degree = 0;
  // plus[n][m], minus[n][m] for n + 2m <= J
  std::vector<std::vector<std::complex<double>>> plus;
  std::vector<std::vector<std::complex<double>>> minus;

  std::complex<double> coefficient(int n, int m, Sign s) const;
};

struct Expansion3D {
  double k = 1.0;
  int max_degree = 0;
  // a[(n, m)][l] for n + 2l <= J
  std::map<std::pair<int, int>, std::vector<std::complex<double>>> a;

  std::complex<double> coefficient(int n, int l, int m) const;
};

using Seeds2D = std::map<std::pair<int, Sign>, std::complex<double>>;
using Seeds3D = std::map<std::pair<int, int>, std::complex<double>>;

/// Fills c+-_{n,m} from the seeds c+-_{n,0} via
/// c_{n,m+1} = -k^2 / (4 (m+1)(n+m+1)) c_{n,m}. Seeds with n > J are ignored,
/// c-_{0,.} stays zero.
Expansion2D expand_2d(const Seeds2D& seeds, double k, int J);

/// a^{(l+1)} = -k^2 / (2 (l+1)(2l+2n+3)) a^{(l)}. Throws DomainError if |m| > n.
Expansion3D expand_3d(const Seeds3D& seeds, double k, int J);

/// Jacobi-Anger seeds of exp(i k x.d), d = (cos theta_d, sin theta_d).
Seeds2D plane_wave_seeds_2d(double k, double theta_d, int J);

/// Seeds of exp(i k x.d) with d at spherical angles (theta_d, phi_d).
Seeds3D plane_wave_seeds_3d(double k, double theta_d, double phi_d, int J);

std::complex<double> evaluate(const Expansion2D& e, double r, double theta);
std::complex<double> evaluate(const Expansion3D& e, double r, double theta, double phi);

/// max |Delta u + k^2 u| over the points by 5-point (2D) or 7-point (3D)
/// differences with step 1e-4, evaluated in extended precision.
/// Points are (r, theta) in 2D and (r, theta, phi) in 3D.
double helmholtz_residual(const Expansion2D& e, const std::vector<std::array<double, 2>>& points, double k);
double helmholtz_residual(const Expansion3D& e, const std::vector<std::array<double, 3>>& points, double k);

/// The `count` lowest nonvanishing homogeneous terms r^j F_j, with the
/// floating coefficients converted exactly to rationals.
std::vector<HomogeneousPolynomial<ComplexRational>> lowest_taylor_terms(const Expansion2D& e, int count);
std::vector<HomogeneousPolynomial<ComplexRational>> lowest_taylor_terms(const Expansion3D& e, int count);

nlohmann::json to_json(const Expansion2D& e);
nlohmann::json to_json(const Expansion3D& e);

}  // namespace cornerscat
