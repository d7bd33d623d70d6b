#include "cornerscat/cone_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cornerscat/errors.hpp"
#include "cornerscat/specfun.hpp"

namespace cornerscat {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kExcludedTol = 1e-12;
constexpr double kScanStep = 0.05;
// Keeps scan nodes off the integers, where orders m > lambda degenerate.
constexpr double kScanOffset = 1.234567e-4;
constexpr double kRootTol = 1e-15;
constexpr double kCertifyTol = 1e-10;
constexpr double kMergeTol = 1e-9;

// Raw boundary function: P_lambda^m(cos omega) or its t-derivative.
double boundary_function(double lambda, int m, double t, BoundaryCondition bc) {
  const specfun::LegendreArg arg{lambda, m, t};
  return bc == BoundaryCondition::Dirichlet ? specfun::legendre_p(arg) : specfun::legendre_p_dt(arg);
}

// prod_{k<K} (lambda-k)(lambda+k+1): vanishes identically-in-t at integers
// below the order, which are not eigenvalues.
double trivial_factor(double lambda, int m, BoundaryCondition bc) {
  const int upto = (bc == BoundaryCondition::Neumann && m == 0) ? 1 : m;
  double f = 1.0;
  for (int k = 0; k < upto; ++k) f *= (lambda - k) * (lambda + k + 1);
  return f;
}

double normalized_function(double lambda, int m, double t, BoundaryCondition bc) {
  return boundary_function(lambda, m, t, bc) / trivial_factor(lambda, m, bc);
}

// Bisection with Illinois-modified secant steps; bracket [a, b] with fa*fb < 0.
template <typename F>
double refine_root(const F& f, double a, double b, double fa, double fb) {
  int side = 0;
  for (int it = 0; it < 300; ++it) {
    if (std::abs(b - a) <= kRootTol * std::max(1.0, std::abs(a))) break;
    double c = (a * fb - b * fa) / (fb - fa);
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double width = hi - lo;
    if (!(c > lo + 0.01 * width && c < hi - 0.01 * width)) c = 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    // Bisect periodically so convergence never stalls.
    if (it % 4 == 3) {
      const double mid = 0.5 * (a + b);
      const double fm = f(mid);
      if (fm == 0.0) return mid;
      if ((fm > 0) == (fa > 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
        fb = fm;
      }
    }
  }
  return 0.5 * (a + b);
}

struct OrderRoot {
  double lambda;
  int order;
  double residual;
};

// Roots in (-1/2, lambda_max] for one order m.
std::vector<OrderRoot> order_roots(double omega, int m, BoundaryCondition bc, double lambda_max) {
  const double t = std::cos(omega);
  std::vector<OrderRoot> roots;
  auto f = [&](double lam) { return normalized_function(lam, m, t, bc); };

  std::vector<double> nodes;
  for (double lam = -0.5 + kScanOffset; lam <= lambda_max + kScanStep; lam += kScanStep) {
    nodes.push_back(lam);
  }
  std::vector<double> values(nodes.size());
  double scale = 1.0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    values[i] = f(nodes[i]);
    scale = std::max(scale, std::abs(boundary_function(nodes[i], m, t, bc)));
  }
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double fa = values[i];
    const double fb = values[i + 1];
    double root;
    if (fa == 0.0) {
      root = nodes[i];
    } else if ((fa > 0) != (fb > 0) && fb != 0.0) {
      root = refine_root(f, nodes[i], nodes[i + 1], fa, fb);
    } else {
      continue;
    }
    if (root <= -0.5 || root > lambda_max) continue;
    const double raw = std::abs(boundary_function(root, m, t, bc)) / scale;
    if (!(raw <= kCertifyTol)) {
      std::ostringstream msg;
      msg << "cone_exponents: root refinement failed for m = " << m << " in bracket [" << nodes[i]
          << ", " << nodes[i + 1] << "], scaled residual " << raw;
      throw ConvergenceError(msg.str());
    }
    roots.push_back({root, m, raw});
  }
  return roots;
}

bool hits(double target, double value) {
  return std::abs(target - value) <= kMergeTol * std::max(1.0, std::abs(value));
}

void require_sector(double omega) {
  if (!(omega > 0.0 && omega < 2.0 * kPi)) {
    throw DomainError("sector opening must lie in (0, 2 pi), got " + std::to_string(omega));
  }
}

void require_cone(double omega) {
  if (!(omega > 0.0 && omega < kPi)) {
    throw DomainError("cone half-angle must lie in (0, pi), got " + std::to_string(omega));
  }
}

bool sector_hits(const SectorGeometry& g, BoundaryCondition bc, double target) {
  const double j = target * g.omega / kPi;
  const double r = std::round(j);
  if (std::abs(j - r) > 1e-12 * std::max(1.0, std::abs(j))) return false;
  return bc == BoundaryCondition::Neumann || r != 0.0;
}

bool cone_hits(const ConeGeometry& g, BoundaryCondition bc, double target) {
  const auto exps = cone_exponents(g, bc, std::abs(target) + 1.0);
  return std::any_of(exps.begin(), exps.end(), [&](const SingularExponent& e) { return hits(target, e.value); });
}

}  // namespace

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryCondition parse_boundary_condition(const std::string& s) {
  if (s == "dirichlet" || s == "D") return BoundaryCondition::Dirichlet;
  if (s == "neumann" || s == "N") return BoundaryCondition::Neumann;
  throw DomainError("unknown boundary condition '" + s + "'");
}

double PiFraction::radians() const { return kPi * static_cast<double>(num) / static_cast<double>(den); }

SectorGeometry SectorGeometry::from_radians(double omega) {
  require_sector(omega);
  return SectorGeometry{omega, std::nullopt};
}

SectorGeometry SectorGeometry::from_pi_fraction(long num, long den) {
  if (den <= 0) throw DomainError("pi fraction needs a positive denominator");
  const long g = std::gcd(num, den);
  const PiFraction f{num / g, den / g};
  require_sector(f.radians());
  return SectorGeometry{f.radians(), f};
}

bool SectorGeometry::is_excluded() const {
  if (exact) return exact->num == exact->den;
  return std::abs(omega - kPi) < kExcludedTol;
}

ConeGeometry ConeGeometry::from_radians(double omega) {
  require_cone(omega);
  return ConeGeometry{omega, std::nullopt};
}

ConeGeometry ConeGeometry::from_pi_fraction(long num, long den) {
  if (den <= 0) throw DomainError("pi fraction needs a positive denominator");
  const long g = std::gcd(num, den);
  const PiFraction f{num / g, den / g};
  require_cone(f.radians());
  return ConeGeometry{f.radians(), f};
}

bool ConeGeometry::is_excluded() const {
  if (exact) return 2 * exact->num == exact->den;
  return std::abs(omega - kPi / 2.0) < kExcludedTol;
}

AngularEigenfunction::AngularEigenfunction(SingularExponent exponent, int dimension, int order)
    : exponent_(std::move(exponent)), dimension_(dimension), order_(order) {}

std::complex<double> AngularEigenfunction::operator()(double theta, double phi) const {
  const double lam = exponent_.value;
  if (dimension_ == 2) {
    return exponent_.bc == BoundaryCondition::Dirichlet ? std::sin(lam * theta) : std::cos(lam * theta);
  }
  const double p = specfun::legendre_p({lam, std::abs(order_), std::cos(theta)});
  return p * std::polar(1.0, static_cast<double>(order_) * phi);
}

double AngularEigenfunction::eigen_residual(double omega, int n) const {
  const double lam = exponent_.value;
  const double h = 1e-3;
  // fourth-order central difference
  auto diff = [h](const auto& g, double x) { return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h); };
  double worst = 0.0;
  double vmax = 0.0;
  if (dimension_ == 2) {
    auto dv = [&](double th) {
      return exponent_.bc == BoundaryCondition::Dirichlet ? lam * std::cos(lam * th) : -lam * std::sin(lam * th);
    };
    for (int i = 0; i < n; ++i) {
      const double th = omega * (i + 0.5) / n;
      const double v = std::real((*this)(th));
      const double d2 = diff(dv, th);
      worst = std::max(worst, std::abs(d2 + lam * lam * v));
      vmax = std::max(vmax, std::abs(v));
    }
    return worst / std::max(vmax, 1e-300);
  }
  const int am = std::abs(order_);
  // V_theta = -sin(theta) P'(cos theta), analytic; V_thetatheta by one central difference.
  auto v_theta = [&](double th) { return -std::sin(th) * specfun::legendre_p_dt({lam, am, std::cos(th)}); };
  for (int i = 0; i < n; ++i) {
    const double th = omega * (i + 0.5) / n;
    const double p = specfun::legendre_p({lam, am, std::cos(th)});
    const double dth = v_theta(th);
    const double d2 = diff(v_theta, th);
    const double s = std::sin(th);
    const double angular = d2 + std::cos(th) / s * dth - static_cast<double>(am * am) / (s * s) * p;
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * kPi * j / n;
      const std::complex<double> e = std::polar(1.0, order_ * phi);
      const std::complex<double> res = (angular + lam * (lam + 1.0) * p) * e;
      worst = std::max(worst, std::abs(res));
      vmax = std::max(vmax, std::abs(p));
    }
  }
  return worst / std::max(vmax, 1e-300);
}

double AngularEigenfunction::boundary_residual(double omega) const {
  const double lam = exponent_.value;
  double vmax = 0.0;
  for (int i = 0; i < 200; ++i) vmax = std::max(vmax, std::abs((*this)(omega * (i + 0.5) / 200.0)));
  vmax = std::max(vmax, 1e-300);
  if (dimension_ == 2) {
    const double v = exponent_.bc == BoundaryCondition::Dirichlet ? std::sin(lam * omega)
                                                                  : -lam * std::sin(lam * omega);
    return std::abs(v) / vmax;
  }
  const int am = std::abs(order_);
  const double t = std::cos(omega);
  const double v = exponent_.bc == BoundaryCondition::Dirichlet
                       ? specfun::legendre_p({lam, am, t})
                       : -std::sin(omega) * specfun::legendre_p_dt({lam, am, t});
  return std::abs(v) / vmax;
}

std::vector<SingularExponent> sector_exponents(const SectorGeometry& geom, BoundaryCondition bc,
                                               double lambda_max) {
  require_sector(geom.omega);
  if (!(lambda_max > 0.0)) throw DomainError("sector_exponents: lambda_max must be positive");
  std::vector<SingularExponent> out;
  const double step = kPi / geom.omega;
  const int jmax = static_cast<int>(std::floor(lambda_max / step + 1e-12));
  for (int j = -jmax; j <= jmax; ++j) {
    if (j == 0 && bc == BoundaryCondition::Dirichlet) continue;
    const double lam = j * step;
    if (lam <= -lambda_max || lam > lambda_max * (1.0 + 1e-15)) continue;
    out.push_back(SingularExponent{lam, bc, j, 1, 0.0, {}});
  }
  return out;
}

std::vector<SingularExponent> cone_exponents(const ConeGeometry& geom, BoundaryCondition bc, double lambda_max,
                                             std::optional<int> only_order) {
  require_cone(geom.omega);
  if (!(lambda_max > 0.0)) throw DomainError("cone_exponents: lambda_max must be positive");

  std::vector<OrderRoot> roots;
  auto scan_order = [&](int m) {
    auto r = order_roots(geom.omega, m, bc, lambda_max);
    if (bc == BoundaryCondition::Neumann && m == 0) {
      // lambda_{N,1} = 0: the constant eigenfunction, removed from the scan by the trivial factor.
      r.push_back({0.0, 0, 0.0});
    }
    const bool any = !r.empty();
    roots.insert(roots.end(), r.begin(), r.end());
    return any;
  };
  if (only_order) {
    scan_order(std::abs(*only_order));
  } else {
    const int cap = static_cast<int>(std::ceil(lambda_max)) + 2;
    for (int m = 0;; ++m) {
      const bool found = scan_order(m);
      // Past the cap, stop at the first order with a root-free scan window.
      if (m >= cap && !found) break;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const OrderRoot& a, const OrderRoot& b) { return a.lambda < b.lambda; });

  std::vector<SingularExponent> positive;
  for (const auto& r : roots) {
    const int mult = r.order == 0 ? 1 : 2;
    if (!positive.empty() && hits(r.lambda, positive.back().value)) {
      auto& e = positive.back();
      e.multiplicity += mult;
      e.orders.push_back(r.order);
      e.index = std::min(e.index, r.order);
      e.residual = std::max(e.residual, r.residual);
      continue;
    }
    positive.push_back(SingularExponent{r.lambda, bc, r.order, mult, r.residual, {r.order}});
  }
  std::vector<SingularExponent> out;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    SingularExponent neg = *it;
    neg.value = -it->value - 1.0;
    out.push_back(neg);
  }
  out.insert(out.end(), positive.begin(), positive.end());
  return out;
}

bool no_exponent_equals_one(const ConeGeometry& geom) {
  const double c = std::cos(geom.omega);
  const double s = std::sin(geom.omega);
  if (geom.is_excluded()) return false;
  return std::abs(c) > kExcludedTol && std::abs(s) > kExcludedTol && std::abs(-c / s) > kExcludedTol;
}

bool sobolev_isomorphism(const SectorGeometry& geom, BoundaryCondition bc, double beta) {
  require_sector(geom.omega);
  return !sector_hits(geom, bc, 1.0 - beta);
}

bool sobolev_isomorphism(const ConeGeometry& geom, BoundaryCondition bc, double beta) {
  return !cone_hits(geom, bc, 0.5 - beta);
}

bool holder_isomorphism(const SectorGeometry& geom, BoundaryCondition bc, double beta, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("holder_isomorphism: alpha must lie in (0, 1)");
  require_sector(geom.omega);
  return !sector_hits(geom, bc, 2.0 + alpha - beta);
}

bool holder_isomorphism(const ConeGeometry& geom, BoundaryCondition bc, double beta, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("holder_isomorphism: alpha must lie in (0, 1)");
  return !cone_hits(geom, bc, 2.0 + alpha - beta);
}

namespace {

template <typename Geom>
void check_weights(const Geom& geom, BoundaryCondition bc, double gamma, double gamma1, double alpha) {
  if (!(gamma1 < gamma && gamma <= 2.0)) throw DomainError("asymptotic_terms: need gamma1 < gamma <= 2");
  if (!holder_isomorphism(geom, bc, gamma, alpha) || !holder_isomorphism(geom, bc, gamma1, alpha)) {
    throw DomainError("asymptotic_terms: weight line hits the spectrum");
  }
}

}  // namespace

std::vector<AngularEigenfunction> asymptotic_terms(const SectorGeometry& geom, BoundaryCondition bc, double gamma,
                                                   double gamma1, double alpha) {
  check_weights(geom, bc, gamma, gamma1, alpha);
  const double lo = 2.0 + alpha - gamma;
  const double hi = 2.0 + alpha - gamma1;
  std::vector<AngularEigenfunction> out;
  for (const auto& e : sector_exponents(geom, bc, std::abs(hi) + 1.0)) {
    if (e.index >= 1 && e.value > lo && e.value < hi) out.emplace_back(e, 2, e.index);
  }
  return out;
}

std::vector<AngularEigenfunction> asymptotic_terms(const ConeGeometry& geom, BoundaryCondition bc, double gamma,
                                                   double gamma1, double alpha) {
  check_weights(geom, bc, gamma, gamma1, alpha);
  const double lo = 2.0 + alpha - gamma;
  const double hi = 2.0 + alpha - gamma1;
  std::vector<AngularEigenfunction> out;
  for (const auto& e : cone_exponents(geom, bc, std::abs(hi) + 1.0)) {
    if (e.value <= -0.5 || !(e.value > lo && e.value < hi)) continue;
    for (int m : e.orders) {
      out.emplace_back(e, 3, m);
      if (m != 0) out.emplace_back(e, 3, -m);
    }
  }
  return out;
}

double admissible_alpha(const ConeGeometry& geom, double alpha) {
  double nearest = 3.5;
  for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    for (const auto& e : cone_exponents(geom, bc, 3.5)) {
      if (e.value > 2.0 + kMergeTol) nearest = std::min(nearest, e.value);
    }
  }
  return std::min(alpha, 0.5 * (nearest - 2.0));
}

void write_exponent_csv(std::ostream& os, const std::vector<SingularExponent>& exps) {
  os << "kind,lambda,index,multiplicity,residual\n";
  char buf[128];
  for (const auto& e : exps) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%d,%.3e\n", to_string(e.bc).c_str(), e.value, e.index,
                  e.multiplicity, e.residual);
    os << buf;
  }
}

}  // namespace cornerscat
