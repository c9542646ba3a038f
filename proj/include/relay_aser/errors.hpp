#pragma once

#include <stdexcept>
#include <string>

namespace relay_aser {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series or quadrature failed to reach its tolerance within the allowed work.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string operation, const std::string& what)
      : std::runtime_error(operation + ": " + what), operation_(std::move(operation)) {}
  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string operation_;
};

/// Series argument outside the region of convergence (some |x_i| >= 1).
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Parameters a sampler cannot realise with the requested construction.
class UnsupportedParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace relay_aser
