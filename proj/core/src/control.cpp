#include "cbclab/control.hpp"

#include <cmath>

#include "cbclab/errors.hpp"

namespace cbclab {

void ControlTarget::validate() const {
  coeffs.validate();
  if (coeffs.a[0] != 0.0) {
    throw ValidationError("ControlTarget: fundamental cosine coefficient must be zero");
  }
}

double control_force(double x_now, double x_prev, double dt, const ControlTarget& target,
                     const ControlGains& gains, double t) {
  if (!(dt > 0.0)) throw ValidationError("control_force: dt must be positive");
  const double v_est = (x_now - x_prev) / dt;
  return gains.kp * (target.coeffs.value_at(t) - x_now) +
         gains.kd * (target.coeffs.derivative_at(t) - v_est);
}

HarmonicCoeffs forcing_coefficients(double a_open, double b_open, const ControlTarget& target,
                                    const HarmonicCoeffs& response, const ControlGains& gains,
                                    double omega) {
  target.validate();
  response.validate();
  if (target.coeffs.n_harm != response.n_harm) {
    throw ValidationError("forcing_coefficients: harmonic count mismatch");
  }
  const double w_rel = std::abs(target.coeffs.omega - response.omega) /
                       std::max(std::abs(omega), 1e-300);
  if (w_rel > 1e-12 || std::abs(target.coeffs.omega - omega) > 1e-12 * std::abs(omega)) {
    throw ValidationError("forcing_coefficients: frequency mismatch");
  }

  const int n = response.n_harm;
  HarmonicCoeffs f = HarmonicCoeffs::zero(omega, n);

  // Projection of kp*e + kd*e' for the coefficient error e = x* - x:
  // the derivative maps (da, db) -> (k w db, -k w da) per harmonic.
  f.a0 = gains.kp * (target.coeffs.a0 - response.a0);
  for (int k = 1; k <= n; ++k) {
    const double da = target.coeffs.a[k - 1] - response.a[k - 1];
    const double db = target.coeffs.b[k - 1] - response.b[k - 1];
    const double kw = k * omega;
    f.a[k - 1] = gains.kp * da + gains.kd * kw * db;
    f.b[k - 1] = gains.kp * db - gains.kd * kw * da;
  }
  f.a[0] += a_open;
  f.b[0] += b_open;
  return f;
}

}  // namespace cbclab
