#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nds {

/// Caller misuse: mismatched spaces, wrong map kind for an operation.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain (eps <= 0, point outside [0,1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A map or family whose declared pieces do not fit together.
class ConstructionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Operation requires a hypothesis the input does not meet.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Operation not available for this map kind (e.g. set preimages of rotations).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid experiment configuration; `field` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace nds
