#pragma once

#include <stdexcept>
#include <string>

namespace spfit {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: arguments, configuration, catalog keys.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A problem instance that violates 0 < eps <= 1, T > 0 or a(t) >= alpha > 0.
class InvalidProblem : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A mesh that fails validation.
class InvalidMesh : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Reference solution could not be trusted.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature failed to reach its tolerance.
class QuadratureError : public OracleError {
 public:
  QuadratureError(const std::string& what, double achieved)
      : OracleError(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// The oracle's accuracy is not fine enough for the error being measured.
class OracleTooCoarse : public OracleError {
 public:
  using OracleError::OracleError;
};

}  // namespace spfit
