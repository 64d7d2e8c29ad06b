#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace siclab {

// Invalid user-supplied data: dimensions, variances, sample counts, file
// contents. The CLI maps every InputError to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation was requested on a plant that is not Schur stable.
class UnstableSystemError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Fewer samples than the regression needs to be well posed.
class InsufficientSamplesError : public InputError {
 public:
  InsufficientSamplesError(const std::string& what, std::ptrdiff_t required)
      : InputError(what), required_(required) {}

  // Smallest sample count N that would have been accepted.
  std::ptrdiff_t required() const noexcept { return required_; }

 private:
  std::ptrdiff_t required_;
};

// The stacked regressor [X_p; U_p] lost row rank.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, double singular_value_ratio)
      : std::runtime_error(what), ratio_(singular_value_ratio) {}

  double singular_value_ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::ptrdiff_t time_index)
      : std::runtime_error(what), time_index_(time_index) {}

  std::ptrdiff_t time_index() const noexcept { return time_index_; }

 private:
  std::ptrdiff_t time_index_;
};

// Raised by batch runners when one trial fails; carries where it happened.
class TrialError : public std::runtime_error {
 public:
  TrialError(const std::string& what, std::size_t trial, int plant = -1)
      : std::runtime_error(what), trial_(trial), plant_(plant) {}

  std::size_t trial() const noexcept { return trial_; }
  int plant() const noexcept { return plant_; }

 private:
  std::size_t trial_;
  int plant_;
};

// No security parameter at or below the sanity cap meets the requirement.
class InfeasibleDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An emitted Monte Carlo row fell below gamma - 3 SE.
class BoundViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace siclab
