#include "cornerscat/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cornerscat/errors.hpp"

namespace cornerscat {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("rational_from_double: non-finite value");
  Rational q;
  mpq_set_d(q.backend().data(), x);
  return q;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

// ---------------------------------------------------------------- Surd

Surd::Surd(Rational a, Rational b, int radicand) : a_(std::move(a)), b_(std::move(b)), d_(radicand) {
  if (radicand < 0) throw DomainError("Surd: negative radicand");
  if (radicand <= 1) {
    if (radicand == 1) a_ += b_;
    b_ = 0;
    d_ = 0;
  }
  if (b_.is_zero()) d_ = 0;
}

int Surd::merge_radicand(const Surd& o) const {
  if (b_.is_zero()) return o.d_;
  if (o.b_.is_zero()) return d_;
  if (d_ != o.d_) throw DomainError("Surd: mixing sqrt(" + std::to_string(d_) + ") and sqrt(" + std::to_string(o.d_) + ")");
  return d_;
}

Surd& Surd::operator+=(const Surd& o) {
  d_ = merge_radicand(o);
  a_ += o.a_;
  b_ += o.b_;
  if (b_.is_zero()) d_ = 0;
  return *this;
}

Surd& Surd::operator-=(const Surd& o) {
  d_ = merge_radicand(o);
  a_ -= o.a_;
  b_ -= o.b_;
  if (b_.is_zero()) d_ = 0;
  return *this;
}

Surd& Surd::operator*=(const Surd& o) {
  const int d = merge_radicand(o);
  Rational a = a_ * o.a_ + b_ * o.b_ * d;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  d_ = b_.is_zero() ? 0 : d;
  return *this;
}

Surd& Surd::operator/=(const Surd& o) {
  const Rational norm = o.a_ * o.a_ - o.b_ * o.b_ * o.d_;
  if (norm.is_zero()) throw DomainError("Surd: division by zero");
  Surd conj(o.a_, -o.b_, o.d_);
  *this *= conj;
  a_ /= norm;
  b_ /= norm;
  return *this;
}

Surd Surd::operator-() const { return Surd(-a_, -b_, d_); }

double Surd::to_double() const {
  return cornerscat::to_double(a_) + cornerscat::to_double(b_) * std::sqrt(static_cast<double>(d_));
}

std::string Surd::str() const {
  std::ostringstream os;
  os << a_;
  if (!b_.is_zero()) os << " + (" << b_ << ")*sqrt(" << d_ << ")";
  return os.str();
}

// ---------------------------------------------------------------- ComplexRational

ComplexRational ComplexRational::from(std::complex<double> z) {
  return {rational_from_double(z.real()), rational_from_double(z.imag())};
}

ComplexRational& ComplexRational::operator+=(const ComplexRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ComplexRational& ComplexRational::operator-=(const ComplexRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ComplexRational& ComplexRational::operator*=(const ComplexRational& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ComplexRational& ComplexRational::operator/=(const ComplexRational& o) {
  const Rational norm = o.re * o.re + o.im * o.im;
  if (norm.is_zero()) throw DomainError("ComplexRational: division by zero");
  *this *= ComplexRational(o.re, -o.im);
  re /= norm;
  im /= norm;
  return *this;
}

// ---------------------------------------------------------------- Interval

Interval::Interval(mpfr_prec_t prec) {
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(long v, mpfr_prec_t prec) : Interval(prec) {
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}

Interval::Interval(const Rational& q, mpfr_prec_t prec) : Interval(prec) {
  mpfr_set_q(lo_, q.backend().data(), MPFR_RNDD);
  mpfr_set_q(hi_, q.backend().data(), MPFR_RNDU);
}

Interval::Interval(const Interval& o) : Interval(o.precision()) {
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept : Interval(o.precision()) {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this != &o) {
    mpfr_set_prec(lo_, o.precision());
    mpfr_set_prec(hi_, o.precision());
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::pi_fraction(long num, long den, mpfr_prec_t prec) {
  if (den <= 0) throw DomainError("Interval::pi_fraction: denominator must be positive");
  Interval pi(prec);
  mpfr_const_pi(pi.lo_, MPFR_RNDD);
  mpfr_const_pi(pi.hi_, MPFR_RNDU);
  return pi * Interval(Rational(num, den), prec);
}

Interval Interval::from_double(double x, mpfr_prec_t prec) {
  if (!std::isfinite(x)) throw DomainError("Interval::from_double: non-finite value");
  Interval r(prec);
  mpfr_set_d(r.lo_, x, MPFR_RNDD);
  mpfr_set_d(r.hi_, x, MPFR_RNDU);
  return r;
}

namespace {

// |f(x) - f(mid)| <= |x - mid| for f = cos, sin.
void lipschitz_enclosure(const Interval& x, mpfr_ptr lo, mpfr_ptr hi, int (*f)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t),
                             mpfr_srcptr xlo, mpfr_srcptr xhi) {
  const mpfr_prec_t prec = x.precision();
  mpfr_t mid, rad, tmp;
  mpfr_inits2(prec + 16, mid, rad, tmp, static_cast<mpfr_ptr>(nullptr));
  mpfr_add(mid, xlo, xhi, MPFR_RNDN);
  mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
  mpfr_sub(rad, xhi, mid, MPFR_RNDU);
  mpfr_sub(tmp, mid, xlo, MPFR_RNDU);
  mpfr_max(rad, rad, tmp, MPFR_RNDU);
  f(tmp, mid, MPFR_RNDD);
  mpfr_sub(lo, tmp, rad, MPFR_RNDD);
  f(tmp, mid, MPFR_RNDU);
  mpfr_add(hi, tmp, rad, MPFR_RNDU);
  if (mpfr_cmp_si(lo, -1) < 0) mpfr_set_si(lo, -1, MPFR_RNDD);
  if (mpfr_cmp_si(hi, 1) > 0) mpfr_set_si(hi, 1, MPFR_RNDU);
  mpfr_clears(mid, rad, tmp, static_cast<mpfr_ptr>(nullptr));
}

}  // namespace

Interval Interval::cos(const Interval& x) {
  Interval r(x.precision());
  lipschitz_enclosure(x, r.lo_, r.hi_, mpfr_cos, x.lo_, x.hi_);
  return r;
}

Interval Interval::sin(const Interval& x) {
  Interval r(x.precision());
  lipschitz_enclosure(x, r.lo_, r.hi_, mpfr_sin, x.lo_, x.hi_);
  return r;
}

Interval& Interval::operator+=(const Interval& o) {
  mpfr_add(lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(hi_, hi_, o.hi_, MPFR_RNDU);
  return *this;
}

Interval& Interval::operator-=(const Interval& o) {
  mpfr_t lo;
  mpfr_init2(lo, precision());
  mpfr_sub(lo, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(hi_, hi_, o.lo_, MPFR_RNDU);
  mpfr_swap(lo_, lo);
  mpfr_clear(lo);
  return *this;
}

Interval& Interval::operator*=(const Interval& o) {
  const mpfr_prec_t prec = precision();
  mpfr_t p, lo, hi;
  mpfr_inits2(prec, p, lo, hi, static_cast<mpfr_ptr>(nullptr));
  mpfr_srcptr a[2] = {lo_, hi_};
  mpfr_srcptr b[2] = {o.lo_, o.hi_};
  mpfr_set_inf(lo, 1);
  mpfr_set_inf(hi, -1);
  for (auto* x : a) {
    for (auto* y : b) {
      mpfr_mul(p, x, y, MPFR_RNDD);
      mpfr_min(lo, lo, p, MPFR_RNDD);
      mpfr_mul(p, x, y, MPFR_RNDU);
      mpfr_max(hi, hi, p, MPFR_RNDU);
    }
  }
  mpfr_swap(lo_, lo);
  mpfr_swap(hi_, hi);
  mpfr_clears(p, lo, hi, static_cast<mpfr_ptr>(nullptr));
  return *this;
}

Interval& Interval::operator/=(const Interval& o) {
  if (o.contains_zero()) throw CertificationError("interval division by an interval containing zero");
  Interval inv(o.precision());
  mpfr_ui_div(inv.lo_, 1, o.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, o.lo_, MPFR_RNDU);
  return *this *= inv;
}

Interval Interval::operator-() const {
  Interval r(precision());
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

double Interval::mignitude() const {
  if (contains_zero()) return 0.0;
  if (mpfr_sgn(lo_) > 0) return mpfr_get_d(lo_, MPFR_RNDD);
  return -mpfr_get_d(hi_, MPFR_RNDU);
}

double Interval::width() const {
  mpfr_t w;
  mpfr_init2(w, precision());
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  const double r = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return r;
}

double Interval::midpoint() const {
  mpfr_t m;
  mpfr_init2(m, precision() + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  const double r = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return r;
}

IntervalRankResult certify_full_column_rank(ExactMatrix<Interval> a, int ncols) {
  IntervalRankResult res;
  res.min_pivot_mignitude = std::numeric_limits<double>::infinity();
  const int nrows = static_cast<int>(a.size());
  for (int col = 0; col < ncols; ++col) {
    int piv = -1;
    double best = 0.0;
    for (int r = col; r < nrows; ++r) {
      const double m = a[r][col].mignitude();
      if (m > best) {
        best = m;
        piv = r;
      }
    }
    if (piv < 0) {
      res.min_pivot_mignitude = 0.0;
      break;
    }
    std::swap(a[col], a[piv]);
    res.min_pivot_mignitude = std::min(res.min_pivot_mignitude, best);
    res.certified_pivots = col + 1;
    for (int r = col + 1; r < nrows; ++r) {
      const Interval f = a[r][col] / a[col][col];
      for (int c = col + 1; c < ncols; ++c) {
        a[r][c] -= f * a[col][c];
        res.max_width = std::max(res.max_width, a[r][c].width());
      }
    }
  }
  res.full_column_rank = res.certified_pivots == ncols;
  if (ncols == 0) res.min_pivot_mignitude = 0.0;
  return res;
}

}  // namespace cornerscat
