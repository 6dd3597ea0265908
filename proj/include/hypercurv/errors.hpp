#pragma once

#include <stdexcept>
#include <string>

namespace hypercurv {

// Invalid construction parameters (a <= b for a sphere cap, slope <= 0, n < 2, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point, or a finite-difference stencil around it, leaves the unmasked domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical breakdown that cannot happen on valid data (e.g. Cholesky of g fails).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The Euclidean gradient vanishes, so its direction is undefined.
class UndefinedDirectionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed grid data (-inf at an unmasked node, wrong value count, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-side hypothesis of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Principal curvatures do not split into the expected multiplicity pattern.
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// More asymptotic boundary points than a nonnegative-Ricci surface can have.
class ContradictionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hypercurv
