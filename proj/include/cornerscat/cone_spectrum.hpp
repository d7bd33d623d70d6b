#pragma once

// Singular exponents (Mellin spectrum) of the Dirichlet/Neumann Laplacian on
// planar sectors and circular cones, plus the weighted-space solvability
// conditions built on them.

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cornerscat {

enum class BoundaryCondition { Dirichlet, Neumann };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& s);

/// An angle given exactly as num/den * pi. Lets downstream exact arithmetic
/// recognize the flat (excluded) cases and quadratic-surd directions.
struct PiFraction {
  long num = 0;
  long den = 1;
  double radians() const;
};

/// Sector K_omega = {0 < theta < omega}, omega in (0, 2 pi).
struct SectorGeometry {
  double omega = 0.0;
  std::optional<PiFraction> exact;

  static SectorGeometry from_radians(double omega);
  static SectorGeometry from_pi_fraction(long num, long den);
  bool is_excluded() const;  // omega == pi
};

/// Circular cone C_omega = {0 < theta < omega}, half-angle omega in (0, pi).
struct ConeGeometry {
  double omega = 0.0;
  std::optional<PiFraction> exact;

  static ConeGeometry from_radians(double omega);
  static ConeGeometry from_pi_fraction(long num, long den);
  bool is_excluded() const;  // 2 omega == pi
};

struct SingularExponent {
  double value = 0.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  /// Harmonic index j (sector) or smallest angular order |m| (cone).
  int index = 0;
  int multiplicity = 1;
  /// |P_lambda^m(cos omega)| (or derivative) at the root, scaled by the
  /// function's magnitude on the scan window; 0 for sectors.
  double residual = 0.0;
  /// All |m| contributing to a merged cone exponent.
  std::vector<int> orders;
};

/// theta -> sin/cos(lambda theta) on a sector, or
/// (theta, phi) -> P_lambda^{|m|}(cos theta) e^{i m phi} on a cone.
class AngularEigenfunction {
 public:
  AngularEigenfunction(SingularExponent exponent, int dimension, int order);

  const SingularExponent& exponent() const { return exponent_; }
  int dimension() const { return dimension_; }
  int order() const { return order_; }

  std::complex<double> operator()(double theta, double phi = 0.0) const;

  /// max |Beltrami(V) + lambda(lambda+1) V| / max|V| on an n x n (theta, phi)
  /// grid over the cap, by central differences. For sectors the 1D analogue
  /// V'' + lambda^2 V.
  double eigen_residual(double omega, int n = 50) const;

  /// Boundary condition defect at theta = omega (value or normal derivative).
  double boundary_residual(double omega) const;

 private:
  SingularExponent exponent_;
  int dimension_;
  int order_;
};

/// Exponents j pi/omega in (-lambda_max, lambda_max], ascending. Dirichlet
/// ranges over j != 0, Neumann over all j.
std::vector<SingularExponent> sector_exponents(const SectorGeometry& geom, BoundaryCondition bc,
                                               double lambda_max);

/// Roots of lambda -> P_lambda^{|m|}(cos omega) (Dirichlet) or its t-derivative
/// (Neumann) on (-1/2, lambda_max], merged across orders, together with their
/// reflections -lambda-1. When `only_order` is set, only that |m| is scanned.
std::vector<SingularExponent> cone_exponents(const ConeGeometry& geom, BoundaryCondition bc,
                                             double lambda_max,
                                             std::optional<int> only_order = std::nullopt);

/// Checks cos(omega), sin(omega), -cos(omega)/sin(omega) are all nonzero.
bool no_exponent_equals_one(const ConeGeometry& geom);

bool sobolev_isomorphism(const SectorGeometry& geom, BoundaryCondition bc, double beta);
bool sobolev_isomorphism(const ConeGeometry& geom, BoundaryCondition bc, double beta);

bool holder_isomorphism(const SectorGeometry& geom, BoundaryCondition bc, double beta, double alpha);
bool holder_isomorphism(const ConeGeometry& geom, BoundaryCondition bc, double beta, double alpha);

/// Exponents with lambda in (2+alpha-gamma, 2+alpha-gamma1) and their angular
/// profiles. Throws DomainError unless gamma1 < gamma <= 2 and both weights
/// avoid the spectrum.
std::vector<AngularEigenfunction> asymptotic_terms(const SectorGeometry& geom, BoundaryCondition bc,
                                                   double gamma, double gamma1, double alpha);
std::vector<AngularEigenfunction> asymptotic_terms(const ConeGeometry& geom, BoundaryCondition bc,
                                                   double gamma, double gamma1, double alpha);

/// Shrinks alpha below half the gap between 2 and the nearest Dirichlet or
/// Neumann exponent above 2, so (2, 2 + alpha) is free of exponents.
double admissible_alpha(const ConeGeometry& geom, double alpha);

/// CSV with header kind,lambda,index,multiplicity,residual.
void write_exponent_csv(std::ostream& os, const std::vector<SingularExponent>& exps);

}  // namespace cornerscat
