#pragma once

#include <stdexcept>
#include <string>

namespace uwit {

enum class ErrorKind {
  NotHermitian,
  NoConvergence,
  DimensionMismatch,
  InvalidWeight,
  RejectionOverflow,
  NotPositive,
  InvalidParameter,
  DegenerateObservable,
  InvalidState,
  Format,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidWeight: return "InvalidWeight";
    case ErrorKind::RejectionOverflow: return "RejectionOverflow";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DegenerateObservable: return "DegenerateObservable";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::Format: return "Format";
  }
  return "Unknown";
}

// Every failure in the library is reported through this type; `kind()` lets
// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// A density-matrix invariant failed. `invariant()` names which one
// ("finite", "dimensions", "hermiticity", "trace", "positivity").
class InvalidStateError : public Error {
 public:
  InvalidStateError(std::string invariant, const std::string& detail)
      : Error(ErrorKind::InvalidState, invariant + " invariant violated: " + detail),
        invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

}  // namespace uwit
