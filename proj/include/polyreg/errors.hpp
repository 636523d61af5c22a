#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyreg {

// Argument outside the mathematical domain of an operation (bad dimension,
// exponent, order of minor, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Gradient requested where the energy is +inf.
class UndefinedGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integrand gradient is not finite somewhere on the grid, so the candidate
// subgradient is not an admissible dual element.
class IntegrabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A deformation sends a node of the domain outside the closed domain.
class DomainViolationError : public std::runtime_error {
 public:
  DomainViolationError(const std::string& what, std::size_t node, double distance)
      : std::runtime_error(what), worst_node_(node), distance_(distance) {}

  std::size_t worst_node() const noexcept { return worst_node_; }
  double distance() const noexcept { return distance_; }

 private:
  std::size_t worst_node_;
  double distance_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an API contract that is not a domain question (for example a
// classical Bregman distance requested with a non-zero minors part).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace polyreg
