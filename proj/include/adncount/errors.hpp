#pragma once

#include <stdexcept>
#include <string>

namespace adn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter combination that no generator or schedule accepts.
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// A degree bound under which no tree on the requested vertex count exists.
class InfeasibleDegreeBound : public InvalidParameters {
 public:
  using InvalidParameters::InvalidParameters;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class DegreeBoundViolated : public Error {
 public:
  using Error::Error;
};

class NonMonotoneAccess : public Error {
 public:
  using Error::Error;
};

/// Theoretical collection budget too large for 128-bit unsigned arithmetic.
class BudgetOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace adn
