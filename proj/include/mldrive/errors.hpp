#pragma once

#include <stdexcept>
#include <string>

namespace mldrive {

// Root of every error the library throws. Each subclass maps to one failure
// class that callers (mostly the scenario runner) treat differently.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or preconditions that the caller controls.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A state or input became non-finite.
class StateCorruptionError : public Error {
 public:
  using Error::Error;
};

// Vector/matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A level or sample lies outside its permitted band.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Sampling-mode query that does not apply to the configured mode.
class ModeError : public Error {
 public:
  using Error::Error;
};

// Spectral analysis precondition failures (window, undefined THD or phase).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

// No rule fires for the input; the caller decides the fallback.
class UncoveredInputError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(const std::string& what, std::size_t last_finite_epoch)
      : Error(what), last_finite_epoch_(last_finite_epoch) {}

  std::size_t last_finite_epoch() const noexcept { return last_finite_epoch_; }

 private:
  std::size_t last_finite_epoch_;
};

}  // namespace mldrive
