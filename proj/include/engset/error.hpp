#pragma once

#include <stdexcept>
#include <string>

namespace engset {

// Every precondition violation surfaced by the library derives from Error so
// callers (the CLI in particular) can separate usage problems from bugs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Raised when a requested TUI cannot be realised with every load below 1.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double min_feasible_tui)
      : Error(what), min_feasible_tui_(min_feasible_tui) {}

  /// Infimum of the TUI values the load family can realise (not attained).
  double min_feasible_tui() const noexcept { return min_feasible_tui_; }

 private:
  double min_feasible_tui_;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class PairingError : public Error {
 public:
  using Error::Error;
};

}  // namespace engset
