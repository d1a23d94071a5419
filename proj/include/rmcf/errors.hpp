#pragma once

#include <stdexcept>
#include <string>

namespace rmcf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numeric quantity left its domain of validity (CLI exit code 3).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The discrete tangent vanished somewhere along the curve.
class DegenerateImmersionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed input data (e.g. non-monotone time samples).
class InputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedBackgroundError : public Error {
 public:
  using Error::Error;
};

/// Thrown by a single step when dt exceeds the parabolic stability bound.
class StepSizeError : public Error {
 public:
  StepSizeError(const std::string& what, double limit) : Error(what), limit_(limit) {}
  double limit() const { return limit_; }

 private:
  double limit_;
};

/// The evolving curve collapsed below the extinction length.
class ExtinctionSignal : public Error {
 public:
  ExtinctionSignal(const std::string& what, double clock, double length)
      : Error(what), clock_(clock), length_(length) {}
  double clock() const { return clock_; }
  double length() const { return length_; }

 private:
  double clock_;
  double length_;
};

/// Curvature history does not blow up, so no singular time can be fitted.
class NoBlowupSignal : public Error {
 public:
  using Error::Error;
};

}  // namespace rmcf
