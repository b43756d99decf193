#pragma once

#include <stdexcept>
#include <string>

namespace bsq {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: unknown system kind, bad parameters, malformed config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Trajectory left the chart or hit a singularity of the Hamiltonian.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive integration could not proceed; carries the last time reached.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_time)
      : Error(what), last_time_(last_time) {}
  double last_time() const { return last_time_; }

 private:
  double last_time_;
};

/// Newton-type iteration failed to converge or diverged.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Hypothesis violation: multiplier 1, negative real multiplier, defective
/// monodromy, non-transversal section, fold in a family.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Numerical quadrature or fit did not reach its accuracy target.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace bsq
