#pragma once

#include <stdexcept>
#include <string>

namespace cbclab {

/// Bad user-facing input: config files, argument ranges, schema violations.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical failure at runtime (divergence, non-convergence). CLI exit code 1.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Trajectory left the admissible region; records when it happened.
class BlowUpError : public NumericsError {
 public:
  BlowUpError(const std::string& msg, double t_diverged)
      : NumericsError(msg), t_diverged_(t_diverged) {}
  double time_of_divergence() const { return t_diverged_; }

 private:
  double t_diverged_;
};

}  // namespace cbclab
