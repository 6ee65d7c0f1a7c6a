#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace relumax {

/// Bad argument, malformed document, or dimension mismatch.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation's structural precondition does not hold for the given
/// network. Carries the offending neuron when one is responsible.
class PreconditionFailed : public std::runtime_error {
 public:
  explicit PreconditionFailed(const std::string& what,
                              std::optional<std::size_t> neuron = std::nullopt)
      : std::runtime_error(what), neuron_(neuron) {}

  std::optional<std::size_t> neuron() const { return neuron_; }

 private:
  std::optional<std::size_t> neuron_;
};

}  // namespace relumax
