#pragma once

#include <stdexcept>
#include <string>

namespace ptf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch or violated shape invariant (m < n, vector lengths).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened for reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A supplied starting point is not strictly feasible.
class InfeasiblePointError : public Error {
 public:
  using Error::Error;
};

/// Cholesky pivot below tolerance: rank-deficient A or extreme scaling.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, int pivot)
      : Error(what), pivot_(pivot) {}
  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

/// Argument outside the domain of a barrier or univariate function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A state left the feasible set F (negative residual beyond tolerance).
class OutsideFeasibleSetError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The predictor search could not find any positive admissible step.
class StallError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptf
