#pragma once

#include <stdexcept>
#include <string>

namespace spinterf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant failed at run time. The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class GridTooNarrow : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TimeMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroField : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateGeometry : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The grid window is too small for the requested evolution time.
class AliasingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoFringesDetected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepTooSmall : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnnormalizedDensity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketMiss : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace spinterf
