#pragma once

// Exact and certified scalar types plus the small amount of field linear
// algebra the polynomial module needs.
//
//   Rational        - GMP rationals
//   Surd            - a + b sqrt(D) over the rationals, D square-free (D = 0: rational)
//   ComplexRational - re + i im over the rationals
//   Interval        - MPFR interval with outward rounding

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <mpfr.h>

namespace cornerscat {

using Rational = boost::multiprecision::mpq_rational;

/// Exact value of a finite double.
Rational rational_from_double(double x);
double to_double(const Rational& q);
inline bool is_zero(const Rational& q) { return q.is_zero(); }
inline std::complex<double> to_complex(const Rational& q) { return {to_double(q), 0.0}; }

class Surd {
 public:
  Surd() = default;
  Surd(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  Surd(Rational a) : a_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  Surd(Rational a, Rational b, int radicand);

  const Rational& rational_part() const { return a_; }
  const Rational& surd_part() const { return b_; }
  int radicand() const { return d_; }
  bool is_rational() const { return b_.is_zero(); }

  Surd& operator+=(const Surd& o);
  Surd& operator-=(const Surd& o);
  Surd& operator*=(const Surd& o);
  Surd& operator/=(const Surd& o);
  Surd operator-() const;
  friend Surd operator+(Surd x, const Surd& y) { return x += y; }
  friend Surd operator-(Surd x, const Surd& y) { return x -= y; }
  friend Surd operator*(Surd x, const Surd& y) { return x *= y; }
  friend Surd operator/(Surd x, const Surd& y) { return x /= y; }
  friend bool operator==(const Surd& x, const Surd& y) { return (x - y).is_zero(); }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  double to_double() const;
  std::string str() const;

 private:
  int merge_radicand(const Surd& o) const;
  Rational a_{0};
  Rational b_{0};
  int d_ = 0;
};

inline bool is_zero(const Surd& s) { return s.is_zero(); }
inline double to_double(const Surd& s) { return s.to_double(); }
inline std::complex<double> to_complex(const Surd& s) { return {s.to_double(), 0.0}; }

struct ComplexRational {
  Rational re{0};
  Rational im{0};

  ComplexRational() = default;
  ComplexRational(long v) : re(v) {}  // NOLINT(google-explicit-constructor)
  ComplexRational(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  /// Exact value of a complex<double>.
  static ComplexRational from(std::complex<double> z);

  ComplexRational& operator+=(const ComplexRational& o);
  ComplexRational& operator-=(const ComplexRational& o);
  ComplexRational& operator*=(const ComplexRational& o);
  ComplexRational& operator/=(const ComplexRational& o);
  ComplexRational operator-() const { return {-re, -im}; }
  friend ComplexRational operator+(ComplexRational x, const ComplexRational& y) { return x += y; }
  friend ComplexRational operator-(ComplexRational x, const ComplexRational& y) { return x -= y; }
  friend ComplexRational operator*(ComplexRational x, const ComplexRational& y) { return x *= y; }
  friend ComplexRational operator/(ComplexRational x, const ComplexRational& y) { return x /= y; }
  friend bool operator==(const ComplexRational& x, const ComplexRational& y) {
    return x.re == y.re && x.im == y.im;
  }
};

inline bool is_zero(const ComplexRational& z) { return z.re.is_zero() && z.im.is_zero(); }
inline std::complex<double> to_complex(const ComplexRational& z) { return {to_double(z.re), to_double(z.im)}; }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const std::complex<double>& z) { return z == std::complex<double>(0.0, 0.0); }
inline std::complex<double> to_complex(double x) { return {x, 0.0}; }
inline std::complex<double> to_complex(const std::complex<double>& z) { return z; }

/// Closed interval [lo, hi] of MPFR numbers; every operation rounds outward.
class Interval {
 public:
  static constexpr mpfr_prec_t kDefaultPrecision = 200;

  explicit Interval(mpfr_prec_t prec = kDefaultPrecision);
  Interval(long v, mpfr_prec_t prec);
  Interval(const Rational& q, mpfr_prec_t prec);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  /// Enclosure of num/den * pi.
  static Interval pi_fraction(long num, long den, mpfr_prec_t prec);
  /// The double x as a point interval (exact).
  static Interval from_double(double x, mpfr_prec_t prec);
  static Interval cos(const Interval& x);
  static Interval sin(const Interval& x);

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  /// Throws CertificationError when o contains zero.
  Interval& operator/=(const Interval& o);
  Interval operator-() const;
  friend Interval operator+(Interval x, const Interval& y) { return x += y; }
  friend Interval operator-(Interval x, const Interval& y) { return x -= y; }
  friend Interval operator*(Interval x, const Interval& y) { return x *= y; }
  friend Interval operator/(Interval x, const Interval& y) { return x /= y; }

  bool contains_zero() const;
  /// min |x| over the interval (0 if it contains zero), rounded down.
  double mignitude() const;
  double width() const;
  double midpoint() const;
  mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

template <typename F>
using ExactMatrix = std::vector<std::vector<F>>;

/// Reduced row echelon form in place; returns pivot columns.
template <typename F>
std::vector<int> rref(ExactMatrix<F>& a, int ncols) {
  std::vector<int> pivots;
  int row = 0;
  const int nrows = static_cast<int>(a.size());
  for (int col = 0; col < ncols && row < nrows; ++col) {
    int piv = -1;
    for (int r = row; r < nrows; ++r) {
      if (!is_zero(a[r][col])) {
        piv = r;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(a[row], a[piv]);
    const F inv = F(1) / a[row][col];
    for (auto& v : a[row]) v *= inv;
    for (int r = 0; r < nrows; ++r) {
      if (r == row || is_zero(a[r][col])) continue;
      const F f = a[r][col];
      for (size_t c = static_cast<size_t>(col); c < a[r].size(); ++c) a[r][c] -= f * a[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename F>
int exact_rank(ExactMatrix<F> a, int ncols) {
  return static_cast<int>(rref(a, ncols).size());
}

/// Basis of {x : A x = 0}.
template <typename F>
std::vector<std::vector<F>> exact_nullspace(ExactMatrix<F> a, int ncols) {
  const auto pivots = rref(a, ncols);
  std::vector<bool> is_pivot(static_cast<size_t>(ncols), false);
  for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;
  std::vector<std::vector<F>> basis;
  for (int free = 0; free < ncols; ++free) {
    if (is_pivot[static_cast<size_t>(free)]) continue;
    std::vector<F> v(static_cast<size_t>(ncols), F(0));
    v[static_cast<size_t>(free)] = F(1);
    for (size_t r = 0; r < pivots.size(); ++r) v[static_cast<size_t>(pivots[r])] = -a[r][static_cast<size_t>(free)];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <typename F>
struct AffineSolution {
  std::vector<F> particular;               // free variables set to zero
  std::vector<std::vector<F>> homogeneous;  // null space basis
};

/// Solves A x = b exactly; nullopt when inconsistent.
template <typename F>
std::optional<AffineSolution<F>> exact_solve(ExactMatrix<F> a, const std::vector<F>& b, int ncols) {
  for (size_t r = 0; r < a.size(); ++r) a[r].push_back(b[r]);
  const auto pivots = rref(a, ncols);
  for (size_t r = pivots.size(); r < a.size(); ++r) {
    if (!is_zero(a[r][static_cast<size_t>(ncols)])) return std::nullopt;
  }
  AffineSolution<F> sol;
  sol.particular.assign(static_cast<size_t>(ncols), F(0));
  for (size_t r = 0; r < pivots.size(); ++r) sol.particular[static_cast<size_t>(pivots[r])] = a[r][static_cast<size_t>(ncols)];
  for (auto& row : a) row.pop_back();
  std::vector<bool> is_pivot(static_cast<size_t>(ncols), false);
  for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;
  for (int free = 0; free < ncols; ++free) {
    if (is_pivot[static_cast<size_t>(free)]) continue;
    std::vector<F> v(static_cast<size_t>(ncols), F(0));
    v[static_cast<size_t>(free)] = F(1);
    for (size_t r = 0; r < pivots.size(); ++r) v[static_cast<size_t>(pivots[r])] = -a[r][static_cast<size_t>(free)];
    sol.homogeneous.push_back(std::move(v));
  }
  return sol;
}

struct IntervalRankResult {
  bool full_column_rank = false;
  int certified_pivots = 0;
  double min_pivot_mignitude = 0.0;
  double max_width = 0.0;  // widest matrix entry after elimination
};

/// Gaussian elimination with max-mignitude pivoting. Full column rank is
/// certified only when every pivot interval excludes zero.
IntervalRankResult certify_full_column_rank(ExactMatrix<Interval> a, int ncols);

}  // namespace cornerscat
