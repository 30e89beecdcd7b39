#pragma once

#include <stdexcept>
#include <string>

namespace cmqop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument sits on a pole of Gamma (or of a Gamma product).
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Spectral parameter with coincident (or resonant) components where a
/// c-function is needed.
class IrregularSpectralParameter : public Error {
 public:
  using Error::Error;
};

/// A Harish-Chandra recursion denominator vanished.
class ResonantSpectralParameter : public Error {
 public:
  using Error::Error;
};

/// Point outside the region where an evaluator is valid (walls, guards,
/// convergence radius).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Series or quadrature did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_tail)
      : Error(what), best_tail_(best_tail) {}
  double best_tail() const noexcept { return best_tail_; }

 private:
  double best_tail_;
};

/// Invalid user configuration (CLI flags, config files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmqop
