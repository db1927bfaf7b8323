#pragma once

#include <stdexcept>
#include <string>

namespace calderon {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Geometry preconditions: misaligned lattices, bad box corners, low resolution.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Boundary data violates a support constraint (nonzero on the inaccessible face).
class TraceSupportError : public Error {
 public:
  using Error::Error;
};

/// The discrete operator has an eigenvalue too close to zero for a reliable solve.
class NearSingularOperator : public Error {
 public:
  using Error::Error;
};

/// Iterative linear solve failed to reach the requested tolerance.
class NonconvergentSolve : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration for the oscillatory remainder failed to contract.
class NonconvergentIteration : public Error {
 public:
  using Error::Error;
};

/// A lattice frequency landed too close to the zero set of the symbol.
class SymbolBreakdown : public Error {
 public:
  using Error::Error;
};

/// Conductivity coefficient fails strict positivity.
class NonpositiveConductivity : public Error {
 public:
  using Error::Error;
};

/// Requested interpolation point lies outside the source lattice hull.
class InterpolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace calderon
