#pragma once

#include <stdexcept>
#include <string>

namespace simcap {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not match what the operation needs.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation (eps_b = 1,
/// angle out of range, degenerate overlap, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-Hermitian input, negative eigenvalues, or a
/// quantity that cannot be evaluated in floating point.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : NumericError(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Local filtering needs an invertible marginal and did not get one.
class SingularMarginalError : public NumericError {
 public:
  SingularMarginalError(const std::string& what, double min_eigenvalue)
      : NumericError(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Malformed user input (files, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace simcap
