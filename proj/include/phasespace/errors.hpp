#pragma once

#include <stdexcept>
#include <string>

namespace phasespace {

// Invalid user-facing configuration (grid sizes, plan parameters, config files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state does not fit its grid: support margin violated or mass wrapped.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation not defined for the given input (wrong representation, no separatrix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phasespace
