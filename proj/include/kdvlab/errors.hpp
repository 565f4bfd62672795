#pragma once

#include <stdexcept>
#include <string>

namespace kdv {

// Exit-code families used by the CLI: configuration (1), numerical (2), I/O (3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a field or argument is not defined on the requested grid.
class GridMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SamplingError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// The closed-form profiles only exist at L = 2*pi.
class WrongLength : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Newton iteration of one implicit step failed to reach tolerance.
class StepFailure : public NumericalError {
 public:
  StepFailure(const std::string& what, double residual, int iterations)
      : NumericalError(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class NoKernel : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SearchFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kdv
