#pragma once

#include "cbclab/harmonics.hpp"

namespace cbclab {

struct ControlGains {
  double kp = 0.0;  // proportional, force per unit response
  double kd = 0.0;  // derivative, force*s per unit response
};

/// Harmonic control target with the phase-fixing constraint a[0] == 0
/// (the fundamental cosine coefficient stays zero; the sweep moves b[0]).
struct ControlTarget {
  HarmonicCoeffs coeffs;

  void validate() const;
};

/// Proportional-derivative feedback force: kp (x*(t) - x) + kd (x*'(t) - v),
/// with the target and its derivative synthesized exactly and the measured
/// velocity estimated by the backward difference (x_now - x_prev)/dt.
double control_force(double x_now, double x_prev, double dt, const ControlTarget& target,
                     const ControlGains& gains, double t);

/// Fourier coefficients of the total forcing
///   F(t) = a_open cos(w t) + b_open sin(w t) + F_ctrl(t)
/// for a band-limited response: the projection of the control law onto each
/// harmonic. Target and response must share omega and n_harm.
HarmonicCoeffs forcing_coefficients(double a_open, double b_open, const ControlTarget& target,
                                    const HarmonicCoeffs& response, const ControlGains& gains,
                                    double omega);

}  // namespace cbclab
