#pragma once

#include <stdexcept>
#include <string>

namespace cornerscat {

/// Argument outside the domain of a function or geometry (excluded angle, |t| >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative procedure (series, root finder, Krylov solve) missed its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An interval computation could not decide a rank; never a silent wrong answer.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid does not resolve the wavelength.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cornerscat
