#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbclab/plant.hpp"

namespace cbclab {

/// One identification sample: measured base-acceleration amplitude at a
/// frequency ratio and response amplitude.
struct DataPoint {
  double a_base = 0.0;
  double zeta = 0.0;
  double x_amp = 0.0;
};

struct Dataset {
  std::vector<DataPoint> points;
  std::string source;     // "openloop" | "cbc"
  std::string noise_tag;  // e.g. "N4"
};

/// Fit parameter vector p = (mu_t, nu_t, rho_t, b_t, c_a).
struct ParamVector {
  double mu_t = 0.0;
  double nu_t = 0.0;
  double rho_t = 0.0;
  double b_t = 0.0;
  double c_a = 1.0;

  std::array<double, 5> to_array() const { return {mu_t, nu_t, rho_t, b_t, c_a}; }
  static ParamVector from_array(const std::array<double, 5>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
};

using Matrix5 = std::array<std::array<double, 5>, 5>;

struct FitBounds {
  std::array<double, 5> lower{-2.0, -1.0, -0.5, 0.0, 1e-4};
  std::array<double, 5> upper{2.0, 1.0, 0.5, 0.5, 1.0};
};

struct FitOptions {
  double ftol_rel = 1e-12;
  int max_evals = 60000;
  bool multi_start = false;  // 8-corner lattice around the init
  double multi_start_spread = 0.25;  // relative offset of the lattice corners
};

struct FitResult {
  ParamVector p_star;
  double residual = 0.0;            // objective value at p_star
  std::array<double, 5> estd{};     // asymptotic standard deviations
  Matrix5 covariance{};
  int m = 0;                        // number of data points
  bool converged = false;
  std::array<bool, 5> singular_flags{};
  int evals = 0;
};

/// Sum of squared base-acceleration residuals of the closed-form response
/// model: R = sum_i (a_base_i - delta_st(x_i, zeta_i; p)/c_a)^2.
double objective(const Dataset& dataset, const ParamVector& p);

/// Derivative-free least squares over (mu_t, nu_t, rho_t, b_t, c_a).
/// Requires at least 5 points. estd/covariance are filled in when m > 5.
FitResult fit(const Dataset& dataset, const ParamVector& init, const FitBounds& bounds = {},
              const FitOptions& options = {});

struct StddevResult {
  std::array<double, 5> estd{};
  Matrix5 covariance{};
  std::array<bool, 5> singular_flags{};
};

/// Asymptotic parameter standard deviations from the model linearization at
/// p_star: sigma^2 (J^T J)^-1 with sigma^2 = R/(m-5), computed through a
/// rank-revealing decomposition so near-singular directions get flagged.
StddevResult asymptotic_stddev(const Dataset& dataset, const ParamVector& p_star);

/// Pointwise (lower, upper) base-acceleration bounds of the identified
/// response curve at confidence `level` (default 95%).
std::vector<std::pair<double, double>> confidence_band(const FitResult& fit_result,
                                                       double zeta,
                                                       std::span<const double> x_grid,
                                                       double level = 0.95);

/// Dimensional parameters from the normalized fit: b = b_t wn, mu = mu_t wn^2, ...
DuffingParams recover_dimensional(const ParamVector& p_tilde, double omega_n);

/// Two-sided standard normal quantile used by the confidence band.
double normal_quantile(double p);

}  // namespace cbclab
