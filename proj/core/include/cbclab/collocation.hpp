#pragma once

#include <array>
#include <utility>
#include <vector>

#include "cbclab/harmonics.hpp"
#include "cbclab/plant.hpp"

namespace cbclab {

/// Converged periodic solution of the forced oscillator under
/// delta_st * omega_n^2 * cos(omega t).
struct PeriodicSolution {
  HarmonicCoeffs coeffs;     // orbit representation
  double omega = 0.0;        // rad/s
  double delta_st = 0.0;     // forcing scale
  double residual_norm = 0.0;
  std::array<double, 2> multiplier_mod{0.0, 0.0};  // Floquet multiplier moduli
  bool stable = false;
  double x_amp = 0.0;        // fundamental amplitude
  double theta = 0.0;        // fundamental phase relative to the cos forcing
};

struct CollocOptions {
  int n_harm = 15;           // internal harmonic count (>= 15 for ground truth)
  double newton_tol = 1e-10; // relative residual target
  int max_newton = 30;
  int floquet_steps = 600;   // variational integration steps per period
};

/// Damped-Newton harmonic balance solve from a caller-supplied guess.
/// Throws NumericsError on divergence.
PeriodicSolution solve_periodic(const DuffingParams& params, double delta_st, double omega,
                                const HarmonicCoeffs& guess, const CollocOptions& opts = {});

/// Floquet multipliers of a given orbit: integrate the variational equation
/// over one period, return eigenvalue moduli of the monodromy matrix.
std::pair<std::array<double, 2>, bool> floquet_stability(const PeriodicSolution& solution,
                                                         const DuffingParams& params,
                                                         int steps_per_period = 600);

enum class FreeParam { delta_st, omega };

struct ContinuationOptions {
  CollocOptions colloc;
  double ds0 = 1e-2;     // initial arclength step (normalized units)
  double ds_min = 1e-5;
  double ds_max = 1e-1;
  double grow = 1.3;     // step growth on fast convergence
  double shrink = 0.5;   // step reduction on Newton failure
  int max_points = 4000;
};

/// Pseudo-arclength continuation of periodic solutions: one of
/// (delta_st, omega) varies over [range.first, range.second], the other stays
/// at the seed's value. Secant predictor, Newton corrector, adaptive step.
/// A step underflow truncates the branch (diagnostic via returned size).
std::vector<PeriodicSolution> continue_branch(const DuffingParams& params, FreeParam free_param,
                                              std::pair<double, double> range,
                                              const PeriodicSolution& seed,
                                              const ContinuationOptions& opts = {});

/// Fundamental-only initial guess built from an amplitude/phase pair.
HarmonicCoeffs fundamental_guess(double x_amp, double theta, double omega, int n_harm);

}  // namespace cbclab
