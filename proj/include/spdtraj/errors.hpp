#pragma once

#include <stdexcept>
#include <string>

namespace spdtraj {

/// Raised when a matrix that must be positive definite is not.
class NotPositiveDefinite : public std::domain_error {
 public:
  NotPositiveDefinite(double eigenvalue, const std::string& where);
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Shapes or dimensions of the operands do not agree.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input files and archives.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spdtraj
