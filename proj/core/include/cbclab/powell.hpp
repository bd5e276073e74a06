#pragma once

#include <functional>
#include <vector>

namespace cbclab {

struct PowellOptions {
  double ftol_rel = 1e-12;   // stop when a full direction sweep improves less
  int max_evals = 40000;
  std::vector<double> step_scale;  // initial step per coordinate; empty -> auto
};

struct PowellResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Powell's conjugate-direction minimization with bound constraints enforced
/// along every line search. Derivative-free; the direction set starts from
/// the coordinate axes and rotates as the search progresses.
PowellResult minimize_powell(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, const PowellOptions& opts = {});

}  // namespace cbclab
