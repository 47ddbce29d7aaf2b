#pragma once

#include <stdexcept>
#include <string>

namespace levyflow {

/// Raised when a numerical procedure cannot reach its stated tolerance
/// (divergent tail estimates, non-contracting iterations, ...).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a documented precondition of an operation is violated.
/// The message names the condition that failed.
struct PreconditionError : std::invalid_argument {
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised on malformed configuration input; the message names the field.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an artifact file cannot be created or written.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levyflow
