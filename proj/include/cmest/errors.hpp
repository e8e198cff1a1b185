#pragma once

#include <stdexcept>
#include <string>

namespace cmest {

/// An iterative method did not reach its tolerance. Carries the best
/// estimate available when it gave up.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The operation is not defined for this noise family (e.g. infinite Fisher information).
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid user-supplied configuration (flags, model spec, experiment setup).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularCovariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Received signal is exactly zero, so its phase is undefined.
class DegenerateSignal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmest
