#pragma once

#include <stdexcept>
#include <string>

namespace vetk {

/// Argument outside the mathematical domain of an operation (negative time,
/// probability outside (0,1), malformed model parameters, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested time or cumulative hazard lies beyond the support of a model.
class SupportExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A VE estimand (or estimate) has no value for the given inputs, e.g. no
/// control-arm events or a zero control hazard.
class UndefinedEstimandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vetk
