#pragma once

#include <stdexcept>
#include <string>

namespace bmt {

// Raised for arguments outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised when an iterative solve exhausts its budget.
struct ConvergenceError : std::runtime_error {
  int iterations {0};
  double residual {0.0};
  ConvergenceError(const std::string& what, int it, double res)
    : std::runtime_error(what), iterations(it), residual(res) {}
};

// Raised when a bracketed equation has no root in its admissible range.
struct NoRootError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a point lies outside the sector a trajectory case requires.
struct SectorError : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised when a finite-difference stencil would leave the domain.
struct StepSizeError : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised when a classification cannot be made outside the dead band.
struct ClassificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bmt
