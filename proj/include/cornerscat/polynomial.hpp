#pragma once

// Homogeneous polynomials in 2 or 3 variables over an arbitrary scalar ring
// (Rational, Surd, ComplexRational, double, complex<double>).

#include <algorithm>
#include <array>
#include <complex>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cornerscat/errors.hpp"
#include "cornerscat/exact.hpp"

namespace cornerscat {

using MultiIndex = std::array<int, 3>;

/// Monomials of total degree `degree` in `dimension` variables, in a fixed
/// order (lexicographically decreasing in the first exponent).
inline std::vector<MultiIndex> monomial_basis(int dimension, int degree) {
  std::vector<MultiIndex> out;
  if (degree < 0) return out;
  if (dimension == 2) {
    for (int i = 0; i <= degree; ++i) out.push_back({degree - i, i, 0});
  } else if (dimension == 3) {
    for (int a = degree; a >= 0; --a)
      for (int b = degree - a; b >= 0; --b) out.push_back({a, b, degree - a - b});
  } else {
    throw DomainError("monomial_basis: dimension must be 2 or 3");
  }
  return out;
}

template <typename S>
class HomogeneousPolynomial {
 public:
  using Terms = std::map<MultiIndex, S>;

  HomogeneousPolynomial() = default;
  HomogeneousPolynomial(int dimension, int degree) : dimension_(dimension), degree_(degree) {
    if (dimension != 2 && dimension != 3) throw DomainError("HomogeneousPolynomial: dimension must be 2 or 3");
  }

  static HomogeneousPolynomial monomial(int dimension, const MultiIndex& alpha, S coeff = S(1)) {
    HomogeneousPolynomial p(dimension, alpha[0] + alpha[1] + alpha[2]);
    if (dimension == 2 && alpha[2] != 0) throw DomainError("monomial: x3 exponent in dimension 2");
    p.set(alpha, std::move(coeff));
    return p;
  }

  /// Coefficients listed in monomial_basis order.
  static HomogeneousPolynomial from_coefficients(int dimension, int degree, const std::vector<S>& c) {
    HomogeneousPolynomial p(dimension, degree);
    const auto basis = monomial_basis(dimension, degree);
    if (c.size() != basis.size()) throw DomainError("from_coefficients: wrong coefficient count");
    for (size_t i = 0; i < basis.size(); ++i) p.set(basis[i], c[i]);
    return p;
  }

  /// |x|^{2l} in the given dimension.
  static HomogeneousPolynomial radial_power(int dimension, int l) {
    HomogeneousPolynomial r2(dimension, 2);
    r2.set({2, 0, 0}, S(1));
    r2.set({0, 2, 0}, S(1));
    if (dimension == 3) r2.set({0, 0, 2}, S(1));
    HomogeneousPolynomial out = monomial(dimension, {0, 0, 0});
    for (int i = 0; i < l; ++i) out = out * r2;
    return out;
  }

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  S coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? S(0) : it->second;
  }

  void set(const MultiIndex& alpha, S value) {
    if (alpha[0] + alpha[1] + alpha[2] != degree_ || alpha[0] < 0 || alpha[1] < 0 || alpha[2] < 0)
      throw DomainError("HomogeneousPolynomial::set: multi-index of wrong degree");
    if (cornerscat::is_zero(value))
      terms_.erase(alpha);
    else
      terms_[alpha] = std::move(value);
  }

  void add_to(const MultiIndex& alpha, const S& value) {
    if (cornerscat::is_zero(value)) return;
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
      set(alpha, value);
      return;
    }
    it->second += value;
    if (cornerscat::is_zero(it->second)) terms_.erase(it);
  }

  std::vector<S> coefficients() const {
    std::vector<S> out;
    for (const auto& a : monomial_basis(dimension_, degree_)) out.push_back(coefficient(a));
    return out;
  }

  HomogeneousPolynomial& operator+=(const HomogeneousPolynomial& o) {
    check_compatible(o);
    if (is_zero()) {
      dimension_ = o.dimension_;
      degree_ = o.degree_;
    }
    for (const auto& [a, c] : o.terms_) add_to(a, c);
    return *this;
  }
  HomogeneousPolynomial& operator-=(const HomogeneousPolynomial& o) {
    check_compatible(o);
    if (is_zero()) {
      dimension_ = o.dimension_;
      degree_ = o.degree_;
    }
    for (const auto& [a, c] : o.terms_) add_to(a, -c);
    return *this;
  }
  friend HomogeneousPolynomial operator+(HomogeneousPolynomial x, const HomogeneousPolynomial& y) { return x += y; }
  /// Exact equality; zero polynomials compare equal regardless of degree.
  friend bool operator==(const HomogeneousPolynomial& x, const HomogeneousPolynomial& y) {
    if (x.is_zero() || y.is_zero()) return x.is_zero() && y.is_zero();
    return x.dimension_ == y.dimension_ && x.degree_ == y.degree_ && x.terms_ == y.terms_;
  }
  friend HomogeneousPolynomial operator-(HomogeneousPolynomial x, const HomogeneousPolynomial& y) { return x -= y; }

  HomogeneousPolynomial scaled(const S& s) const {
    HomogeneousPolynomial out(dimension_, degree_);
    for (const auto& [a, c] : terms_) out.set(a, c * s);
    return out;
  }

  friend HomogeneousPolynomial operator*(const HomogeneousPolynomial& x, const HomogeneousPolynomial& y) {
    if (x.dimension_ != y.dimension_) throw DomainError("polynomial product: dimension mismatch");
    HomogeneousPolynomial out(x.dimension_, x.degree_ + y.degree_);
    for (const auto& [a, c] : x.terms_)
      for (const auto& [b, d] : y.terms_) out.add_to({a[0] + b[0], a[1] + b[1], a[2] + b[2]}, c * d);
    return out;
  }

  HomogeneousPolynomial derivative(int var) const {
    HomogeneousPolynomial out(dimension_, std::max(degree_ - 1, 0));
    if (degree_ == 0) return out;
    for (const auto& [a, c] : terms_) {
      if (a[var] == 0) continue;
      MultiIndex b = a;
      b[var] -= 1;
      out.add_to(b, c * S(static_cast<long>(a[var])));
    }
    return out;
  }

  /// Laplacian; degree drops by 2 (a degree < 2 polynomial maps to the zero
  /// polynomial of degree 0).
  HomogeneousPolynomial laplacian() const {
    HomogeneousPolynomial out(dimension_, std::max(degree_ - 2, 0));
    if (degree_ < 2) return out;
    for (const auto& [a, c] : terms_) {
      for (int v = 0; v < dimension_; ++v) {
        if (a[v] < 2) continue;
        MultiIndex b = a;
        b[v] -= 2;
        out.add_to(b, c * S(static_cast<long>(a[v]) * (a[v] - 1)));
      }
    }
    return out;
  }

  HomogeneousPolynomial bilaplacian() const { return laplacian().laplacian(); }

  /// Value at a point given in the same scalar type.
  S evaluate_exact(const std::array<S, 3>& x) const {
    S sum(0);
    for (const auto& [a, c] : terms_) {
      S term = c;
      for (int v = 0; v < dimension_; ++v)
        for (int k = 0; k < a[v]; ++k) term *= x[static_cast<size_t>(v)];
      sum += term;
    }
    return sum;
  }

  std::complex<double> evaluate(const std::array<double, 3>& x) const {
    std::complex<double> sum(0.0, 0.0);
    for (const auto& [a, c] : terms_) {
      double m = 1.0;
      for (int v = 0; v < dimension_; ++v) m *= ipow(x[static_cast<size_t>(v)], a[v]);
      sum += to_complex(c) * m;
    }
    return sum;
  }

  template <typename T, typename Convert>
  HomogeneousPolynomial<T> convert(Convert f) const {
    HomogeneousPolynomial<T> out(dimension_, degree_);
    for (const auto& [a, c] : terms_) out.set(a, f(c));
    return out;
  }

 private:
  static double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
  }
  void check_compatible(const HomogeneousPolynomial& o) const {
    if (o.is_zero()) return;
    if (dimension_ != o.dimension_ || (degree_ != o.degree_ && !is_zero()))
      throw DomainError("polynomial sum: dimension or degree mismatch");
  }

  int dimension_ = 2;
  int degree_ = 0;
  Terms terms_;
};

using RationalPolynomial = HomogeneousPolynomial<Rational>;

}  // namespace cornerscat

namespace cornerscat {

template <typename F>
struct HarmonicPiece {
  int l = 0;                      // power of |x|^2
  F b{1};                         // scalar factor (always 1; H carries the scale)
  HomogeneousPolynomial<F> harmonic;  // H_{n-2l}
};

/// p = sum_l b_l |x|^{2l} H_{n-2l} with every H exactly harmonic, obtained by
/// repeatedly solving Delta(|x|^2 g) = Delta(p) for g in P_{n-2}.
template <typename F>
std::vector<HarmonicPiece<F>> harmonic_decompose(const HomogeneousPolynomial<F>& p) {
  std::vector<HarmonicPiece<F>> out;
  const int dim = p.dimension();
  HomogeneousPolynomial<F> rest = p;
  int degree = p.degree();
  for (int l = 0; degree >= 0; ++l, degree -= 2) {
    if (degree < 2) {
      out.push_back({l, F(1), rest});
      break;
    }
    const auto r2 = HomogeneousPolynomial<F>::radial_power(dim, 1);
    const auto sub = monomial_basis(dim, degree - 2);
    const int n = static_cast<int>(sub.size());
    ExactMatrix<F> a(sub.size(), std::vector<F>(sub.size(), F(0)));
    for (int j = 0; j < n; ++j) {
      const auto img = (r2 * HomogeneousPolynomial<F>::monomial(dim, sub[static_cast<size_t>(j)])).laplacian();
      for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = img.coefficient(sub[static_cast<size_t>(i)]);
    }
    const auto lap = rest.laplacian();
    std::vector<F> rhs;
    for (const auto& m : sub) rhs.push_back(lap.coefficient(m));
    const auto sol = exact_solve(a, rhs, n);
    if (!sol || !sol->homogeneous.empty()) throw DomainError("harmonic_decompose: singular system");
    const auto g = HomogeneousPolynomial<F>::from_coefficients(dim, degree - 2, sol->particular);
    HomogeneousPolynomial<F> h = rest - r2 * g;
    out.push_back({l, F(1), h.is_zero() ? HomogeneousPolynomial<F>(dim, degree) : h});
    rest = g.is_zero() ? HomogeneousPolynomial<F>(dim, degree - 2) : g;
  }
  return out;
}

}  // namespace cornerscat
