#pragma once

#include <stdexcept>
#include <string>

namespace shearlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or inputs outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class SingularSymbol : public DomainError {
 public:
  using DomainError::DomainError;
};

// A run could not continue (resolution loss, step-size collapse, ...).
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

class CflViolation : public NumericalAbort {
 public:
  CflViolation(const std::string& what, double suggested_dt)
      : NumericalAbort(what), suggested_dt_(suggested_dt) {}
  [[nodiscard]] double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

}  // namespace shearlab
