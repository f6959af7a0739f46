#pragma once

#include <stdexcept>
#include <string>

namespace nvstrain {

// Thrown when an operation receives a tensor expressed in a frame it
// cannot consume (e.g. symmetry shifts from a lab-frame tensor).
class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strain magnitude outside the linear regime the coupling model is valid for.
class StrainRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Mixing angle undefined: both E-symmetry shifts vanish identically.
class DegenerateStrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested mixing angle cannot be produced by any static deflection.
class UnreachableAngleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data cannot identify the requested parameters (rank deficiency,
// missing orientation group, insufficient angular coverage).
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimizer failed to converge or produced an unusable solution.
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what, double residual_norm = 0.0)
      : std::runtime_error(what), residual_norm_(residual_norm) {}
  double residual_norm() const { return residual_norm_; }

 private:
  double residual_norm_;
};

// Numerical failure outside of fitting (quadrature not converging,
// root bracketing impossible, overflow).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nvstrain
