#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

/// Base class for all library errors.
class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical integral could not reach the requested tolerance within budget.
class UnreachableTolerance : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

/// A convolution does not define a locally finite Borel measure.
class NotAMeasure : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

/// The operation has no implemented rule for the given kinds of input.
class Unsupported : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

/// A value violates a documented invariant (negative weight, bad ratio, ...).
class InvalidArgument : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

class SeedStreamExhausted : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

class InconsistentGrid : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

class InsufficientPairs : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

/// Invalid configuration text. Carries a 1-based line/column when known.
class ConfigError : public SpectralError {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : SpectralError(format(what, line, column)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }

  int line_;
  int column_;
};

}  // namespace spectral
