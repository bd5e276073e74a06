#pragma once

#include <span>
#include <vector>

namespace cbclab {

/// Frequency-normalized oscillator coefficients bound to a drive ratio
/// zeta = omega/omega_n.
struct TildeParams {
  double mu_t = 0.0;
  double nu_t = 0.0;
  double rho_t = 0.0;
  double b_t = 0.0;
  double zeta = 1.0;
};

/// One point of the closed-form amplitude response.
struct ResponsePoint {
  double x_amp = 0.0;
  double delta_st = 0.0;   // equivalent static deflection of the forcing
  double theta = 0.0;      // response phase, in (-pi, 0] for b_t > 0
  bool stable_hint = false;  // sign of d(delta_st)/dX on the evaluation grid
};

/// Branch turning point of the amplitude response.
struct Fold {
  double x_amp = 0.0;
  double delta_st = 0.0;
};

/// Closed-form response phase for a given amplitude: the two-argument
/// arctangent form, so the angle lands in (-pi, 0] for positive damping.
double phase_angle(double x_amp, const TildeParams& p);

/// Equivalent static deflection producing amplitude x_amp at ratio zeta.
/// Continuous through cos(theta) = 0.
double static_deflection(double x_amp, const TildeParams& p);

/// Evaluate the amplitude response over a grid of amplitudes; stable_hint
/// comes from the central-difference slope of delta_st(X).
std::vector<ResponsePoint> s_curve(const TildeParams& p, std::span<const double> x_grid);

/// Default amplitude grid: n points biased logarithmically toward zero.
std::vector<double> default_x_grid(double x_max, int n = 2000);

/// All response amplitudes at a given forcing level, one entry per zeta.
struct FrequencyResponseSlice {
  double zeta = 0.0;
  std::vector<double> x;  // ascending; 1 or 3 entries for an S-shaped model
};

/// Solve static_deflection(X; zeta) = delta_st for X on each zeta of the grid
/// by a dense bracketing scan up to x_max plus bisection (1e-10 relative).
/// Throws NumericsError when more than 3 roots appear.
std::vector<FrequencyResponseSlice> frequency_response(const TildeParams& p_without_zeta,
                                                       double delta_st,
                                                       std::span<const double> zeta_grid,
                                                       double x_max);

/// Response amplitudes at one forcing level for the bound zeta (ascending;
/// 1 or 3 entries on an S-shaped curve).
std::vector<double> amplitude_roots(const TildeParams& p, double delta_st, double x_max);

/// Locate folds (roots of d delta_st/dX) by sign-change bracketing on a dense
/// grid and bisection on the central-difference derivative. Sorted by X.
/// Throws NumericsError when the count comes out odd (grid too coarse).
std::vector<Fold> find_folds(const TildeParams& p, double x_min, double x_max,
                             int grid_points = 2000);

}  // namespace cbclab
