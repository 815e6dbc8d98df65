#pragma once

#include <stdexcept>
#include <string>

namespace hrl {

/// Dimension disagreement between operands. Messages name both shapes.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input outside an operation's documented domain (bad label, empty list, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; message carries the line number where known.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation invoked in the wrong lifecycle order (e.g. policy training
/// before pretraining, double backward on one tape).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Non-finite value detected where finiteness is required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad invocation: unknown flag, unknown config key, malformed --set.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hrl
