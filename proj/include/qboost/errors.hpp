#pragma once

#include <stdexcept>
#include <string>

namespace qboost {

/// Strong classification was requested from a model with no classifiers.
class InvalidModelError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a closed-form rule.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A configured resource cap (branch enumeration, amplitude memory) would be exceeded.
class CapExceededError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Caller violated an operation's precondition.
class PreconditionError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// A structural invariant of a value would be broken.
class InvariantViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace qboost
