#pragma once

#include <stdexcept>
#include <string>

namespace bcfr {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
   using std::runtime_error::runtime_error;
};

/// Malformed input values: unnormalized distributions, non-finite numbers, bad lengths.
class ValidationError : public Error {
  public:
   using Error::Error;
};

/// The game tree (or a history / network shape) is inconsistent.
class StructuralError : public Error {
  public:
   using Error::Error;
};

/// Experiment or solver configuration cannot be honoured.
class ConfigError : public Error {
  public:
   using Error::Error;
};

/// A regret table was driven with the wrong accumulation rule.
class ModeMismatchError : public Error {
  public:
   using Error::Error;
};

/// The likelihood estimator has no reference points.
class EstimatorUnavailableError : public Error {
  public:
   using Error::Error;
};

/// Kernel normaliser underflowed.
class DegenerateKernelError : public Error {
  public:
   using Error::Error;
};

/// The requested computation is not defined for this kind of game.
class UnsupportedModeError : public Error {
  public:
   using Error::Error;
};

class TrainingDivergedError : public Error {
  public:
   using Error::Error;
};

/// Binary checkpoint could not be parsed or does not match the target.
class CheckpointError : public Error {
  public:
   using Error::Error;
};

}  // namespace bcfr
