#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fosterflow {

/// The input graph does not meet an operation's structural requirements.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation that needs a connected graph receives one with
/// several components. Carries the component count for diagnostics.
class DisconnectedGraphError : public PreconditionError {
public:
  explicit DisconnectedGraphError(std::size_t component_count)
      : PreconditionError("graph is disconnected: " +
                              std::to_string(component_count) +
                              " connected components"),
        component_count_(component_count) {}

  std::size_t component_count() const noexcept { return component_count_; }

private:
  std::size_t component_count_;
};

/// A decomposition or solve failed to produce a usable result.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fosterflow
