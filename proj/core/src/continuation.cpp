#include "cbclab/continuation.hpp"

#include <cmath>
#include <numbers>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void CbcSettings::validate() const {
  if (delta_b1 == 0.0) throw ValidationError("CbcSettings: delta_b1 must be nonzero");
  if (!(hh_tol_rel > 0.0) || !(hh_tol_abs > 0.0)) {
    throw ValidationError("CbcSettings: tolerances must be positive");
  }
  if (max_fp_iters < 1) throw ValidationError("CbcSettings: max_fp_iters must be >= 1");
  if (settle_periods < 1 || avg_periods < 1) {
    throw ValidationError("CbcSettings: settle/avg periods must be >= 1");
  }
  if (n_harm < 1) throw ValidationError("CbcSettings: n_harm must be >= 1");
  if (steps_per_period < 2 * n_harm + 1) {
    throw ValidationError("CbcSettings: steps_per_period must be >= 2*n_harm+1");
  }
}

double higher_harmonic_norm(const HarmonicCoeffs& coeffs) {
  double hh2 = 0.5 * coeffs.a0 * coeffs.a0;
  for (int k = 2; k <= coeffs.n_harm; ++k) {
    hh2 += coeffs.a[k - 1] * coeffs.a[k - 1] + coeffs.b[k - 1] * coeffs.b[k - 1];
  }
  return std::sqrt(hh2);
}

CbcRunner::CbcRunner(const DuffingParams& params, const NoiseConfig& noise,
                     const SimOptions& sim, double omega, const ControlGains& gains,
                     const CbcSettings& settings)
    : plant_([&] {
        SimOptions o = sim;
        o.dt = kTwoPi / omega / settings.steps_per_period;
        return PlantSim(params, noise, PlantState{}, o);
      }()),
      omega_(omega),
      gains_(gains),
      settings_(settings) {
  settings_.validate();
  if (!(omega > 0.0)) throw ValidationError("CbcRunner: omega must be positive");
  x_prev_ = plant_.state().x;
}

const PlantState& CbcRunner::plant_state() const { return plant_.state(); }

void CbcRunner::set_open_loop(double a_open, double b_open) {
  a_open_ = a_open;
  b_open_ = b_open;
}

void CbcRunner::tick(bool record) {
  const double x_now = plant_.state().x;
  const double t = plant_.state().t;
  const double fc = control_force(x_now, x_prev_, plant_.dt(), *active_target_, gains_, t);
  const double f_now = a_open_ * std::cos(omega_ * t) + b_open_ * std::sin(omega_ * t) + fc;

  if (record) {
    rec_x_.push_back(x_now);
    rec_f_.push_back(f_now);
    rec_base_.push_back(plant_.base_accel_output(f_now));
  }

  // Periodic demand varies within the step; the control output is held.
  plant_.step([this](double tt) {
    return a_open_ * std::cos(omega_ * tt) + b_open_ * std::sin(omega_ * tt);
  }, fc);
  x_prev_ = x_now;
}

Measurement CbcRunner::measure_steady_state(const ControlTarget& target) {
  target.validate();
  if (std::abs(target.coeffs.omega - omega_) > 1e-12 * omega_) {
    throw ValidationError("measure_steady_state: target frequency mismatch");
  }
  active_target_ = &target;
  const int m = settings_.steps_per_period;
  const double dt = plant_.dt();

  for (int i = 0; i < settings_.settle_periods * m; ++i) tick(false);

  const std::size_t window = static_cast<std::size_t>(settings_.avg_periods) * m + 1;
  rec_x_.clear();
  rec_f_.clear();
  rec_base_.clear();
  rec_x_.reserve(window);
  rec_f_.reserve(window);
  rec_base_.reserve(window);
  // The window starts on a whole-period boundary, so "t = 0 of the first
  // sample" and the absolute forcing phase agree modulo 2*pi.
  for (std::size_t i = 0; i + 1 < window; ++i) tick(true);
  // closing sample without advancing past the window
  {
    const double x_now = plant_.state().x;
    const double t = plant_.state().t;
    const double fc = control_force(x_now, x_prev_, dt, target, gains_, t);
    const double f_now = a_open_ * std::cos(omega_ * t) + b_open_ * std::sin(omega_ * t) + fc;
    rec_x_.push_back(x_now);
    rec_f_.push_back(f_now);
    rec_base_.push_back(plant_.base_accel_output(f_now));
  }
  active_target_ = nullptr;

  Measurement meas;
  meas.response = project(rec_x_, dt, omega_, settings_.n_harm, settings_.avg_periods);
  meas.forcing = project(rec_f_, dt, omega_, settings_.n_harm, settings_.avg_periods);
  meas.base_accel = project(rec_base_, dt, omega_, settings_.n_harm, settings_.avg_periods);

  for (const HarmonicCoeffs* c : {&meas.response, &meas.forcing, &meas.base_accel}) {
    if (!std::isfinite(c->a0) || !std::isfinite(c->a[0]) || !std::isfinite(c->b[0])) {
      throw NumericsError("measure_steady_state: non-finite coefficients");
    }
  }
  return meas;
}

CbcRunner::CorrectionResult CbcRunner::correct_higher_harmonics(ControlTarget target) {
  CorrectionResult res;
  for (int pass = 0; pass < settings_.max_fp_iters; ++pass) {
    res.measurement = measure_steady_state(target);
    res.iters = pass + 1;
    const double phi =
        std::hypot(res.measurement.forcing.a[0], res.measurement.forcing.b[0]);
    const double hh = higher_harmonic_norm(res.measurement.forcing);
    res.hh_history.push_back(hh);
    if (hh <= std::max(settings_.hh_tol_rel * phi, settings_.hh_tol_abs)) {
      res.converged = true;
      break;
    }
    if (pass + 1 >= settings_.max_fp_iters) break;
    // Move the non-fundamental target coefficients onto the measurement.
    target.coeffs.a0 = res.measurement.response.a0;
    for (int k = 2; k <= settings_.n_harm; ++k) {
      target.coeffs.a[k - 1] = res.measurement.response.a[k - 1];
      target.coeffs.b[k - 1] = res.measurement.response.b[k - 1];
    }
  }
  res.target = target;
  return res;
}

namespace {

// Phase of the measured window relative to a pure-cosine reference.
double relative_phase(const HarmonicCoeffs& response, const HarmonicCoeffs& forcing) {
  if (std::hypot(response.a[0], response.b[0]) == 0.0) return 0.0;
  const double ph_x = std::atan2(-response.b[0], response.a[0]);
  const double ph_f = std::atan2(-forcing.b[0], forcing.a[0]);
  return wrap_angle(ph_x - ph_f);
}

}  // namespace

Branch run_amplitude_sweep(const DuffingParams& params, const NoiseConfig& noise,
                           const SimOptions& sim, double omega, double b1_start,
                           double b1_stop, const ControlGains& gains,
                           const CbcSettings& settings) {
  settings.validate();
  const double delta = (b1_stop >= b1_start) ? std::abs(settings.delta_b1)
                                             : -std::abs(settings.delta_b1);
  const int n_steps =
      static_cast<int>(std::floor((b1_stop - b1_start) / delta + 1e-9)) + 1;
  if (n_steps < 1) throw ValidationError("run_amplitude_sweep: empty b1 range");

  CbcRunner runner(params, noise, sim, omega, gains, settings);
  ControlTarget target;
  target.coeffs = HarmonicCoeffs::zero(omega, settings.n_harm);

  Branch branch;
  branch.points.reserve(static_cast<std::size_t>(n_steps));

  for (int j = 0; j < n_steps; ++j) {
    target.coeffs.b[0] = b1_start + j * delta;
    target.coeffs.a[0] = 0.0;

    BranchPoint pt;
    pt.b1_target = target.coeffs.b[0];
    try {
      if (settings.correct_higher_harmonics) {
        auto res = runner.correct_higher_harmonics(target);
        target = res.target;
        pt.fp_iters_used = res.iters;
        pt.accepted = res.converged || !settings.strict_acceptance;
        pt.response = res.measurement.response;
        pt.forcing = res.measurement.forcing;
        pt.base_accel_amp =
            std::hypot(res.measurement.base_accel.a[0], res.measurement.base_accel.b[0]);
      } else {
        Measurement meas = runner.measure_steady_state(target);
        pt.fp_iters_used = 1;
        pt.accepted = true;
        pt.response = meas.response;
        pt.forcing = meas.forcing;
        pt.base_accel_amp = std::hypot(meas.base_accel.a[0], meas.base_accel.b[0]);
      }
    } catch (const BlowUpError& e) {
      branch.truncated = true;
      branch.diagnostic = e.what();
      break;
    }

    pt.phi = std::hypot(pt.forcing.a[0], pt.forcing.b[0]);
    pt.x_amp = std::hypot(pt.response.a[0], pt.response.b[0]);
    pt.theta = relative_phase(pt.response, pt.forcing);
    pt.hh_residual = higher_harmonic_norm(pt.forcing);
    pt.target = target;
    branch.points.push_back(std::move(pt));

    // Warm start: fold the measured fundamental forcing into the open-loop
    // part so the controller only supplies the next increment.
    runner.set_open_loop(branch.points.back().forcing.a[0],
                         branch.points.back().forcing.b[0]);
  }
  return branch;
}

}  // namespace cbclab
