#pragma once

#include <stdexcept>
#include <string>

namespace vdw {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad grid, mismatched model kinds).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A caller-side precondition does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Input tables lack entries an operation needs (ladder gaps, flagged entries).
class IncompleteInputError : public Error {
public:
  using Error::Error;
};

/// A requested computation exceeds a declared size budget.
class BudgetError : public Error {
public:
  BudgetError(const std::string& what, double required, double budget)
      : Error(what + " (required " + std::to_string(required) + ", budget " +
              std::to_string(budget) + ")"),
        required_(required), budget_(budget) {}

  double required() const noexcept { return required_; }
  double budget() const noexcept { return budget_; }

private:
  double required_;
  double budget_;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

private:
  double best_residual_;
};

/// The shifted projected operator is not positive definite: the requested
/// energy is not below the spectrum of the projected complement.
class GapError : public Error {
public:
  using Error::Error;
};

/// Ground state of a model atom (or atom pair) is numerically degenerate.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

} // namespace vdw
