#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ehdc {

/// Argument outside the mathematical domain of a function (negative rate,
/// rate above the overflow cap, sigma2 <= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mismatched lengths or otherwise malformed inputs.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constraint family cannot be met. `prefix` is the 1-based slot index of
/// the first violated cumulative constraint, or 0 when not applicable.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::size_t prefix = 0)
      : std::runtime_error(what), prefix_(prefix) {}
  std::size_t prefix() const noexcept { return prefix_; }

 private:
  std::size_t prefix_;
};

/// Solver asked to run on a configuration it does not handle.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brute-force oracle refusing an instance above its size guard.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ehdc
