#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace curlwave {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Requested value lies outside the numerically reachable range
/// (e.g. a Minus-branch period beyond the separatrix cap).
class RangeError : public std::range_error {
 public:
  explicit RangeError(const std::string& what) : std::range_error(what) {}
};

/// Invalid user configuration (profile parameters, JSON schema, CLI values).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Step-size underflow or a failed root bracket inside a numerical kernel.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The breather construction is impossible because a hypothesis is violated.
class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(std::string hypothesis, const std::string& what)
      : std::runtime_error(what), hypothesis_(std::move(hypothesis)) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

}  // namespace curlwave
