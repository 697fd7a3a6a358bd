#pragma once

#include <stdexcept>
#include <string>

namespace stolqr {

// Base of every error thrown by the library. The CLI maps ConfigError (and
// its subclasses) to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DimensionMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A block that must be positive definite is not (within tolerance).
class SingularBlock : public NumericalError {
 public:
  SingularBlock(const std::string& what, double eigenvalue)
      : NumericalError(what + " (min eigenvalue " + std::to_string(eigenvalue) + ")"),
        eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class NotStable : public NumericalError {
 public:
  NotStable(const std::string& what, double radius)
      : NumericalError(what + " (spectral radius " + std::to_string(radius) + ")"),
        radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

class Infeasible : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, double residual)
      : NumericalError(what + " (last residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NoProgress : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficientData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ExperimentFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace stolqr
