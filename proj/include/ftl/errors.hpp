#pragma once

#include <stdexcept>
#include <string>

namespace ftl {

// Argument outside the mathematical domain of a function (e.g. rho < 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Particle ordering lost; indicates integrator failure, never user error.
class StateCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ftl
