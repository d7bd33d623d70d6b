#pragma once

// Legendre functions of real degree, spherical harmonics, and the cylinder
// functions needed by the 2D fundamental solution.
//
// Convention: P_lambda^m(t) = (1 - t^2)^{m/2} d^m/dt^m P_lambda(t), with no
// Condon-Shortley phase. All functions are pure.

#include <complex>
#include <vector>

namespace cornerscat::specfun {

struct LegendreArg {
  double degree;  // lambda, any real
  int order;      // m >= 0
  double t;       // |t| < 1
};

struct SphericalHarmonicIndex {
  int degree;  // n >= 0
  int order;   // |m| <= n
};

/// P_lambda^m(t). Throws DomainError for |t| >= 1 or m < 0, ConvergenceError if
/// a series misses its tolerance.
double legendre_p(const LegendreArg& arg);

/// d/dt P_lambda^m(t).
double legendre_p_dt(const LegendreArg& arg);

/// Second t-derivative, obtained from the associated Legendre equation.
double legendre_p_dt2(const LegendreArg& arg);

/// d/dlambda P_lambda^m(t) by central differences, step 1e-6 max(1, |lambda|).
double legendre_p_dlambda(const LegendreArg& arg);

/// d/dlambda of d/dt P_lambda^m(t), same differencing.
double legendre_p_dt_dlambda(const LegendreArg& arg);

/// Normalized Y_n^m(theta, phi) with P_n^{|m|}(cos theta) e^{i m phi}.
std::complex<double> spherical_harmonic(const SphericalHarmonicIndex& idx, double theta, double phi);

/// Normalization sqrt((2n+1)/(4 pi) (n-|m|)!/(n+|m|)!).
double spherical_harmonic_norm(int n, int m);

/// det [[P_n^m, P_{n-2}^m], [(P_n^m)', (P_{n-2}^m)']] at t; requires n-2 >= m >= 0.
double wronskian_det(int n, int m, double t);

/// H_0^{(1)}(x) = J_0(x) + i Y_0(x) for x > 0.
std::complex<double> cylinder_hankel0(double x);

/// H_1^{(1)}(x) for x > 0.
std::complex<double> cylinder_hankel1(double x);

/// Integer-order Bessel functions (thin wrappers over the standard library).
double bessel_j(int n, double x);
double bessel_y(int n, double x);
double bessel_j_dx(int n, double x);
double bessel_y_dx(int n, double x);
std::complex<double> hankel1(int n, double x);
std::complex<double> hankel1_dx(int n, double x);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

}  // namespace cornerscat::specfun
