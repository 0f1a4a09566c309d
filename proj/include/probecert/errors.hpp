#pragma once

#include <stdexcept>
#include <string>

namespace probecert {

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch coarsely; the distinct types exist so tests can pin down which
// contract was violated.

// Operands over mismatched ground sets (bit widths, matrix shapes).
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed inputs: unnormalized distributions, overlapping partition parts,
// bad probabilities, invalid edges.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A documented operation precondition does not hold.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Instance exceeds an exhaustive-mode cap.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A feasibility assumption of the problem itself fails (e.g. a support
// scenario that can never be certified).
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// "Should be impossible" guards around theory-backed termination arguments.
struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

// An inline algorithmic invariant failed during a run. Carries enough context
// to replay the offending world.
struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace probecert
