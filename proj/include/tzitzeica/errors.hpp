#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tz {

// Base class for every failure raised by the library. The CLI maps the
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : Error(what), key_(std::move(key)) {}
  // Dotted path of the offending configuration key, if any.
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidPeriodMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The lattice sum would need a larger radius than the policy allows.
class TruncationOverflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The field itself is singular at the requested point. Samplers flag such
// points and move on; other numerical errors abort.
class SingularPoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// |theta| is below the zero threshold: the argument sits on (or next to)
// the theta divisor and ln(theta) is not differentiable there.
class ThetaDivisorError : public SingularPoint {
 public:
  using SingularPoint::SingularPoint;
};

class MarkedPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CoincidentSpectrumError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// det(1 - Omega J) vanishes at the requested point.
class SolutionSingular : public SingularPoint {
 public:
  using SingularPoint::SingularPoint;
};

class DegenerateTrajectory : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TrackingFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace tz
