#pragma once

// Biharmonic Cauchy problems and special solutions on sectors and cones,
// for homogeneous polynomial data.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cornerscat/cone_spectrum.hpp"
#include "cornerscat/exact.hpp"
#include "cornerscat/polynomial.hpp"

namespace cornerscat {

/// Exact laplacian of p.
template <typename S>
HomogeneousPolynomial<S> laplacian(const HomogeneousPolynomial<S>& p) {
  return p.laplacian();
}

/// Boundary direction (cos w, sin w) as surds when w is k pi / q with q in
/// {1, 2, 3, 4, 6}; nullopt otherwise.
std::optional<std::pair<Surd, Surd>> exact_direction(const PiFraction& angle);

/// Linear constraints on the coefficients (monomial_basis order) of a degree-d
/// polynomial: Delta^2 rows, then trace rows, then normal-derivative rows.
template <typename S>
struct BoundaryConditionSystem {
  int dimension = 2;
  int degree = 0;
  ExactMatrix<S> rows;
  int bilaplacian_rows = 0;
  int trace_rows = 0;
  int normal_rows = 0;
  int columns() const { return static_cast<int>(monomial_basis(dimension, degree).size()); }
};

BoundaryConditionSystem<Surd> sector_system_exact(const Surd& c, const Surd& s, int degree);
BoundaryConditionSystem<Interval> sector_system_interval(const Interval& c, const Interval& s, int degree);
BoundaryConditionSystem<double> sector_system_float(double omega, int degree);
BoundaryConditionSystem<Surd> cone_system_exact(const Surd& c, const Surd& s, int degree);
BoundaryConditionSystem<Interval> cone_system_interval(const Interval& c, const Interval& s, int degree);
BoundaryConditionSystem<double> cone_system_float(double omega, int degree);

/// Rank of a row-equilibrated matrix, singular values above 1e-8 sigma_max.
int float_rank(const BoundaryConditionSystem<double>& sys);

struct NullspaceOptions {
  mpfr_prec_t precision_bits = Interval::kDefaultPrecision;
  bool force_interval = false;
};

struct NullspaceReport {
  int dimension = 2;
  int degree = 0;
  double omega = 0.0;
  std::string method;  // "exact" or "interval"
  int rows = 0;
  int columns = 0;
  int rank = 0;  // exact rank, or certified pivot count
  int float_rank = 0;
  bool certified = false;
  mpfr_prec_t precision_bits = 0;
  double min_pivot_mignitude = 0.0;
  double max_interval_width = 0.0;
  std::vector<HomogeneousPolynomial<Surd>> basis;
};

/// Basis of {p in P_d : Delta^2 p = 0, p = d_nu p = 0 on the boundary}.
/// Exact surd arithmetic when the angle is a supported pi fraction, otherwise
/// interval elimination; throws CertificationError if the interval rank
/// cannot be decided.
NullspaceReport cauchy_nullspace(const SectorGeometry& geom, int degree, const NullspaceOptions& opts = {});
NullspaceReport cauchy_nullspace(const ConeGeometry& geom, int degree, const NullspaceOptions& opts = {});

struct LogTerm {
  std::complex<double> coefficient;
  double exponent = 0.0;  // kappa + 2
  int order = 0;          // m (cone) or 0
  std::string profile;
};

struct SpecialSolution2D {
  HomogeneousPolynomial<Surd> polynomial_part;
  std::vector<LogTerm> log_terms;
  bool resonant = false;
};

/// Component a r^kappa Y_n^m of the right-hand side.
struct SolidHarmonicTerm {
  int n = 0;
  int m = 0;
  std::complex<double> a;
};

struct ConeComponent {
  SolidHarmonicTerm term;
  Rational zeta;
  bool resonant = false;
  /// Coefficient of the degree kappa+2 solid harmonic r^{kappa+2} P^{|m|}_{kappa+2}(cos theta) e^{i m phi}
  /// subtracted to meet the boundary condition (non-resonant case).
  std::complex<double> correction;
  /// Resonance constant c (resonant case).
  std::complex<double> log_constant;
};

struct SpecialSolutionCone {
  int kappa = 0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  HomogeneousPolynomial<std::complex<double>> polynomial_part;
  std::vector<ConeComponent> components;
  std::vector<LogTerm> log_terms;
  bool resonant = false;
  bool angular_corrector_constructed = false;
};

/// q of degree kappa+2 with Delta q = p and the boundary condition on both
/// edges; in the resonant case (kappa+2) w / pi in N, q meets the condition
/// on theta = 0 and a log term r^{kappa+2}(ln r sin + theta cos) (Dirichlet) or
/// r^{kappa+2}(ln r cos - theta sin) (Neumann) repairs theta = w.
SpecialSolution2D special_solution_2d(const RationalPolynomial& p, const SectorGeometry& geom, BoundaryCondition bc);

SpecialSolutionCone special_solution_cone(const std::vector<SolidHarmonicTerm>& p, int kappa, const ConeGeometry& geom,
                                          BoundaryCondition bc);

/// Solid harmonic r^n Y_n^m as a polynomial with complex coefficients.
HomogeneousPolynomial<std::complex<double>> solid_harmonic(int n, int m);

/// |x|^{2j} r^n Y_n^m as a polynomial (degree n + 2j).
HomogeneousPolynomial<std::complex<double>> radial_solid_harmonic(int n, int m, int j);

/// r^l P_l^{|m|}(cos theta) e^{i m phi} (unnormalized solid harmonic).
HomogeneousPolynomial<std::complex<double>> legendre_solid_harmonic(int l, int m);
HomogeneousPolynomial<ComplexRational> legendre_solid_harmonic_exact(int l, int m);

struct ResidualReport {
  double pde = 0.0;
  double boundary_value = 0.0;
  double boundary_normal = 0.0;
  double boundary_condition = 0.0;  // boundary_value (Dirichlet) or boundary_normal (Neumann)
  bool boundary_checked = false;    // false for resonant cone solutions
  bool exact_pde = false;       // Delta q - p is the zero polynomial
  bool exact_boundary = false;  // polynomial part meets both conditions exactly
};

ResidualReport verify_special_solution(const SpecialSolution2D& sol, const RationalPolynomial& p,
                                       const SectorGeometry& geom, BoundaryCondition bc);
ResidualReport verify_special_solution(const SpecialSolutionCone& sol, const std::vector<SolidHarmonicTerm>& p,
                                       const ConeGeometry& geom, BoundaryCondition bc, int samples = 500);

struct WedgeFamily {
  bool consistent = false;
  HomogeneousPolynomial<Surd> particular;
  std::vector<HomogeneousPolynomial<Surd>> homogeneous;
};

/// Solutions q in P_degree of Delta q = rhs, q = d_nu q = 0 on both edges.
/// rhs must be exactly harmonic.
WedgeFamily wedge_nullspace_2d_family(const SectorGeometry& geom, int degree, const RationalPolynomial& rhs);

nlohmann::json to_json(const RationalPolynomial& p);
nlohmann::json to_json(const HomogeneousPolynomial<Surd>& p);
nlohmann::json to_json(const HomogeneousPolynomial<ComplexRational>& p);
nlohmann::json to_json(const NullspaceReport& r);
RationalPolynomial rational_polynomial_from_json(const nlohmann::json& j);

}  // namespace cornerscat
