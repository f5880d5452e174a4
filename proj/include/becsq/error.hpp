#pragma once

#include <stdexcept>
#include <string>

namespace becsq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock-space cutoff too small to hold the initial coherent state.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A sampled mode profile does not integrate to one.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Field amplitudes left the finite range during integration.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Stochastic norm drifted beyond tolerance; the time step is too coarse.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

class InsufficientTrajectoriesError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or mode-sum failed to reach the requested accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Raised when the experiment kinds of two records differ.
class KindMismatchError : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation failure; the message carries line/key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace becsq
