#ifndef SIGMALAB_ERROR_HPP
#define SIGMALAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sigmalab {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclass to a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inadmissible user input (exit code 2).
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A verification failed: an identity or invariant did not hold (exit code 3).
class CheckFailure : public Error {
 public:
  using Error::Error;
};

/// Numerical trouble: evaluation on a pole, ill-conditioned quadrature,
/// blow-up, failed re-projection (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class PoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sigmalab

#endif
