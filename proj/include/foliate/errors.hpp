#pragma once

#include <stdexcept>
#include <string>

namespace foliate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent solver configuration (step, truncation, grid layout).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An input function produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double point)
      : Error(what + " (at t = " + std::to_string(point) + ")"), point_(point) {}

  double point() const noexcept { return point_; }

 private:
  double point_;
};

/// A function of the wrong kind was supplied, e.g. a non-periodic input
/// where a periodic one is required.
class KindError : public Error {
 public:
  using Error::Error;
};

/// The coefficient in front of the derivative dropped below its floor.
class SingularCoefficientError : public Error {
 public:
  using Error::Error;
};

/// A point lies on or outside the circles bounding the annulus.
class OutOfAnnulusError : public Error {
 public:
  using Error::Error;
};

/// A flow trajectory left its working region.
class EscapeError : public Error {
 public:
  EscapeError(const std::string& what, double exit_time)
      : Error(what + " (exit time " + std::to_string(exit_time) + ")"),
        exit_time_(exit_time) {}

  double exit_time() const noexcept { return exit_time_; }

 private:
  double exit_time_;
};

/// A bundle cover is malformed (unknown box, missing or invalid transition).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Local data on a bundle cover disagree on an overlap in the trivialized
/// frame. Distinguishes bad input from solver failure.
class InputDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace foliate
