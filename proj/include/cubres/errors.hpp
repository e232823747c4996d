#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cubres {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: a precondition of the called operation does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine broke down (singular solve, non-convergent iteration,
/// residual contract violated).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The eigenvalue iteration failed to converge.  `index` is the size of the
/// trailing submatrix that was still unreduced when the iteration gave up.
class EigenConvergenceError : public NumericalError {
 public:
  EigenConvergenceError(const std::string& what, long index)
      : NumericalError(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

/// Two candidate eigenvalues are closer to each other than the distance
/// being measured, so nearest-neighbour tracking is not trustworthy.
class MatchingAmbiguityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Overflow while evaluating an oscillator basis function.
class BasisOverflowError : public NumericalError {
 public:
  BasisOverflowError(const std::string& what, int j, std::complex<double> z)
      : NumericalError(what), j_(j), z_(z) {}
  int index() const noexcept { return j_; }
  std::complex<double> argument() const noexcept { return z_; }

 private:
  int j_;
  std::complex<double> z_;
};

/// A result could not be certified: uncertainty above the configured
/// ceiling, too few stable levels, too few finite Pade orders.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace cubres
