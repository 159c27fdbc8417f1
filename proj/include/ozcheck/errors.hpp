#pragma once

#include <stdexcept>
#include <string>

namespace ozcheck {

/// Argument outside the domain of an operation (t outside [0,1], q < 2, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Grid or fibre-dimension mismatch between operands.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A fibre that should be positive has an eigenvalue below -tol.
struct PositivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotSquareZeroError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Order-zero calculus called with a function that does not vanish at 0.
struct CalculusDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested computation exceeds the configured size budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecompositionViolation : std::runtime_error {
  DecompositionViolation(const std::string& what, double eigenvalue)
      : std::runtime_error(what), offending_eigenvalue(eigenvalue) {}
  double offending_eigenvalue;
};

struct ConstructionInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ozcheck
