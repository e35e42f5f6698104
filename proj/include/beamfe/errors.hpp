#pragma once

#include <stdexcept>
#include <string>

namespace beamfe {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter coordinate outside [-1, 1].
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Centerline tangent (numerically) vanishes.
class DegenerateTangent : public Error {
 public:
  using Error::Error;
};

/// External moment with a component along the centerline tangent applied to a
/// torsion-free element.
class TangentialMomentError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration did not converge within the iteration limit.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int iterations) : Error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

/// Adaptive stepping reduced the step below its floor.
class StepFloor : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a result or configuration file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or schema-violating scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace beamfe
