#include "cbclab/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cbclab/errors.hpp"
#include "cbclab/harmonics.hpp"

namespace cbclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Dwell at one (frequency, amplitude) point and project the averaged window.
// The forcing phase continues across points through `phase_origin`, like a
// generator that never stops between sweep steps.
SweepPoint dwell_and_measure(PlantSim& plant, double f_hz, double amp, double& phase_origin,
                             const SweepSettings& s) {
  const double omega = kTwoPi * f_hz;
  const double dt = 1.0 / (f_hz * s.steps_per_period);
  plant.set_dt(dt);

  const double t0 = plant.state().t;
  const double phi0 = phase_origin;
  auto force = [&](double t) { return amp * std::cos(phi0 + omega * (t - t0)); };

  const int m = s.steps_per_period;
  for (int i = 0; i < s.settle_periods * m; ++i) plant.step(force);

  const std::size_t window = static_cast<std::size_t>(s.avg_periods) * m + 1;
  std::vector<double> xs, fs, bs;
  xs.reserve(window);
  fs.reserve(window);
  bs.reserve(window);
  for (std::size_t i = 0; i < window; ++i) {
    const double t = plant.state().t;
    const double f = force(t);
    xs.push_back(plant.state().x);
    fs.push_back(f);
    bs.push_back(plant.base_accel_output(f));
    if (i + 1 < window) plant.step(force);
  }

  // Whole dwells of whole periods: the carried phase stays on the grid.
  phase_origin = std::remainder(
      phi0 + omega * (plant.state().t - t0), kTwoPi);

  const HarmonicCoeffs cx = project(xs, dt, omega, s.n_harm, s.avg_periods);
  const HarmonicCoeffs cf = project(fs, dt, omega, s.n_harm, s.avg_periods);
  const HarmonicCoeffs cb = project(bs, dt, omega, s.n_harm, s.avg_periods);

  SweepPoint pt;
  pt.freq_hz = f_hz;
  pt.forcing_amp = std::hypot(cf.a[0], cf.b[0]);
  pt.base_accel_amp = std::hypot(cb.a[0], cb.b[0]);
  pt.x_amp = std::hypot(cx.a[0], cx.b[0]);
  const double ph_f = std::atan2(-cf.b[0], cf.a[0]);
  const double ph_x = (pt.x_amp > 0.0) ? std::atan2(-cx.b[0], cx.a[0]) : ph_f;
  pt.theta = wrap_angle(ph_x - ph_f);
  return pt;
}

void flag_jumps(std::vector<SweepPoint>& pts, double factor) {
  if (pts.size() < 3) return;
  std::vector<double> steps;
  steps.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    steps.push_back(std::abs(pts[i].x_amp - pts[i - 1].x_amp));
  }
  std::vector<double> sorted = steps;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (median <= 0.0) return;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (steps[i - 1] > factor * median) pts[i].jumped = true;
  }
}

}  // namespace

void SweepSettings::validate() const {
  if (settle_periods < 1 || avg_periods < 1) {
    throw ValidationError("SweepSettings: dwell periods must be >= 1");
  }
  if (n_harm < 1) throw ValidationError("SweepSettings: n_harm must be >= 1");
  if (steps_per_period < 2 * n_harm + 1) {
    throw ValidationError("SweepSettings: steps_per_period must be >= 2*n_harm+1");
  }
  if (!(jump_factor > 0.0)) throw ValidationError("SweepSettings: jump_factor must be positive");
}

SweepRecord frequency_sweep(const DuffingParams& params, const NoiseConfig& noise,
                            const SimOptions& sim, double forcing_amp, double f_start_hz,
                            double f_stop_hz, double f_step_hz, SweepDirection direction,
                            const SweepSettings& settings) {
  settings.validate();
  if (!(f_step_hz > 0.0)) throw ValidationError("frequency_sweep: f_step_hz must be positive");
  if (!(f_start_hz > 0.0) || !(f_stop_hz > f_start_hz)) {
    throw ValidationError("frequency_sweep: need 0 < f_start < f_stop");
  }

  const int n = static_cast<int>(std::llround((f_stop_hz - f_start_hz) / f_step_hz)) + 1;
  std::vector<double> freqs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) freqs[static_cast<std::size_t>(i)] = f_start_hz + i * f_step_hz;
  if (direction == SweepDirection::down) std::reverse(freqs.begin(), freqs.end());

  PlantSim plant(params, noise, PlantState{}, sim);
  SweepRecord rec;
  rec.points.reserve(freqs.size());
  double phase_origin = 0.0;
  for (double f : freqs) {
    try {
      rec.points.push_back(dwell_and_measure(plant, f, forcing_amp, phase_origin, settings));
    } catch (const BlowUpError& e) {
      rec.truncated = true;
      rec.diagnostic = e.what();
      break;
    }
  }
  flag_jumps(rec.points, settings.jump_factor);
  return rec;
}

SweepRecord amplitude_sweep(const DuffingParams& params, const NoiseConfig& noise,
                            const SimOptions& sim, double omega, double amp_start,
                            double amp_stop, double amp_step, SweepDirection direction,
                            const SweepSettings& settings, std::optional<PlantState> init) {
  settings.validate();
  if (!(amp_step > 0.0)) throw ValidationError("amplitude_sweep: amp_step must be positive");
  if (!(omega > 0.0)) throw ValidationError("amplitude_sweep: omega must be positive");
  if (!(amp_stop >= amp_start)) {
    throw ValidationError("amplitude_sweep: need amp_start <= amp_stop");
  }

  const int n = static_cast<int>(std::llround((amp_stop - amp_start) / amp_step)) + 1;
  std::vector<double> amps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) amps[static_cast<std::size_t>(i)] = amp_start + i * amp_step;
  if (direction == SweepDirection::down) std::reverse(amps.begin(), amps.end());

  const double f_hz = omega / kTwoPi;
  PlantSim plant(params, noise, init.value_or(PlantState{}), sim);
  SweepRecord rec;
  rec.points.reserve(amps.size());
  double phase_origin = 0.0;
  for (double a : amps) {
    try {
      rec.points.push_back(dwell_and_measure(plant, f_hz, a, phase_origin, settings));
    } catch (const BlowUpError& e) {
      rec.truncated = true;
      rec.diagnostic = e.what();
      break;
    }
  }
  flag_jumps(rec.points, settings.jump_factor);
  return rec;
}

namespace {

// Parabolic refinement of the peak amplitude from three grid samples.
double refined_peak_amp(const std::vector<SweepPoint>& pts, std::size_t i) {
  if (i == 0 || i + 1 >= pts.size()) return pts[i].x_amp;
  const double y0 = pts[i - 1].x_amp, y1 = pts[i].x_amp, y2 = pts[i + 1].x_amp;
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom >= 0.0) return y1;
  const double d = 0.5 * (y0 - y2) / denom;
  return y1 - 0.25 * (y0 - y2) * d;
}

// Interpolated frequencies where the curve crosses `level` on both sides of
// the peak. Throws when a crossing lies outside the swept range.
std::pair<double, double> bandwidth_crossings(const std::vector<SweepPoint>& pts,
                                              std::size_t i_peak, double level) {
  auto interp = [&](std::size_t lo, std::size_t hi) {
    const double x0 = pts[lo].x_amp, x1 = pts[hi].x_amp;
    const double f0 = pts[lo].freq_hz, f1 = pts[hi].freq_hz;
    return f0 + (level - x0) / (x1 - x0) * (f1 - f0);
  };
  double f_lo = 0.0, f_hi = 0.0;
  bool found_lo = false, found_hi = false;
  for (std::size_t i = i_peak; i > 0; --i) {
    if (pts[i - 1].x_amp <= level && pts[i].x_amp >= level) {
      f_lo = interp(i - 1, i);
      found_lo = true;
      break;
    }
  }
  for (std::size_t i = i_peak; i + 1 < pts.size(); ++i) {
    if (pts[i + 1].x_amp <= level && pts[i].x_amp >= level) {
      f_hi = interp(i + 1, i);
      found_hi = true;
      break;
    }
  }
  if (!found_lo || !found_hi) {
    throw NumericsError("estimate_linear_modal: 3 dB bandwidth leaves the swept range");
  }
  return {f_lo, f_hi};
}

}  // namespace

LinearModal estimate_linear_modal(const DuffingParams& params, const NoiseConfig& noise,
                                  const SimOptions& sim, double low_amp, double f_start_hz,
                                  double f_stop_hz, double f_step_hz,
                                  const SweepSettings& settings) {
  const auto up = frequency_sweep(params, noise, sim, low_amp, f_start_hz, f_stop_hz,
                                  f_step_hz, SweepDirection::up, settings)
                      .points;
  const auto down = frequency_sweep(params, noise, sim, low_amp, f_start_hz, f_stop_hz,
                                    f_step_hz, SweepDirection::down, settings)
                        .points;
  if (up.size() < 3 || down.size() < 3) {
    throw NumericsError("estimate_linear_modal: sweep truncated");
  }

  auto argmax = [](const std::vector<SweepPoint>& pts) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].x_amp > pts[best].x_amp) best = i;
    }
    return best;
  };
  const std::size_t iu = argmax(up);
  const std::size_t id = argmax(down);
  if (iu == 0 || iu + 1 == up.size() || id == 0 || id + 1 == down.size()) {
    throw NumericsError("estimate_linear_modal: response peak at range edge, widen the sweep");
  }

  LinearModal out;
  out.peak_up_hz = up[iu].freq_hz;
  out.peak_down_hz = down[id].freq_hz;
  out.f_n_hz = 0.5 * (out.peak_up_hz + out.peak_down_hz);

  double zeta_sum = 0.0;
  for (const auto* sweep : {&up, &down}) {
    const std::size_t ip = argmax(*sweep);
    const double x_pk = refined_peak_amp(*sweep, ip);
    const auto [f_lo, f_hi] = bandwidth_crossings(*sweep, ip, x_pk / std::numbers::sqrt2);
    zeta_sum += std::abs(f_hi - f_lo) / (2.0 * out.f_n_hz);
  }
  out.damping_ratio = 0.5 * zeta_sum;

  // Post-hoc smallness check on the cubic restoring share at the peak.
  const double x_pk = std::max(up[iu].x_amp, down[id].x_amp);
  const double cubic_share =
      std::abs(params.mu) * x_pk * x_pk / (params.omega_n * params.omega_n);
  out.nonlinearity_warning = cubic_share > 0.01;
  return out;
}

}  // namespace cbclab
