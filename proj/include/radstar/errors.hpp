#pragma once

#include <stdexcept>
#include <string>

namespace radstar {

/// Parameters fall outside the existence window for steady stars.
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid scalar input (non-positive density, temperature, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Query outside the stored radial range of a profile.
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// The Lane-Emden integration ran past r_max without a sign change.
struct NoFirstZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite state encountered during ODE integration.
struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form solution requested for an unsupported polytropic index.
struct UnsupportedIndex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Boundary fit window holds too few grid nodes.
struct InsufficientResolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched grids/profiles passed to an operation.
struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Common base for fatal failures during time stepping.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The Lagrangian map lost monotonicity (r_x <= 0): fatal.
struct InversionError : SolverError {
  using SolverError::SolverError;
};

/// An implicit solve failed to reach its residual tolerance.
struct SolverDiverged : SolverError {
  using SolverError::SolverError;
};

/// Temperature went negative beyond the roundoff threshold.
struct NegativeTemperature : SolverError {
  using SolverError::SolverError;
};

/// Self-similar solution queried past its collapse time.
struct LifetimeExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace radstar
