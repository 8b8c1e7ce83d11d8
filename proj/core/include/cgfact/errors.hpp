#pragma once

#include <stdexcept>
#include <string>

namespace cgfact {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside its admissible range (copula theta, tau, alpha, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: empty groups, bad status codes, mismatched dimensions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Too few subjects for the requested computation.
class InsufficientSampleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A survival curve was queried beyond the range where it is identified.
class TauValidityError : public Error {
 public:
  using Error::Error;
};

// The hypothesis cannot be tested from this data (zero trace, zero eigenvalues).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-PSD covariance, non-convergence, overflow.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A non-Archimedean copula was used where a generator is required.
class NonArchimedeanError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace cgfact
