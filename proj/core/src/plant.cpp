#include "cbclab/plant.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

DuffingParams::Tilde DuffingParams::tilde() const {
  const double wn2 = omega_n * omega_n;
  return Tilde{mu / wn2, nu / wn2, rho / wn2, b / omega_n};
}

DuffingParams DuffingParams::from_tilde(double omega_n, const Tilde& t) {
  DuffingParams p;
  p.omega_n = omega_n;
  const double wn2 = omega_n * omega_n;
  p.b = t.b_t * omega_n;
  p.mu = t.mu_t * wn2;
  p.nu = t.nu_t * wn2;
  p.rho = t.rho_t * wn2;
  p.validate();
  return p;
}

double DuffingParams::f_n_hz() const { return omega_n / kTwoPi; }

double DuffingParams::restoring(double x) const {
  const double x2 = x * x;
  return x * (omega_n * omega_n + x2 * (mu + x2 * (nu + x2 * rho)));
}

double DuffingParams::restoring_derivative(double x) const {
  const double x2 = x * x;
  return omega_n * omega_n + x2 * (3.0 * mu + x2 * (5.0 * nu + x2 * 7.0 * rho));
}

void DuffingParams::validate() const {
  if (!(omega_n > 0.0)) throw ValidationError("DuffingParams: omega_n must be positive");
  if (!std::isfinite(b) || !std::isfinite(mu) || !std::isfinite(nu) || !std::isfinite(rho)) {
    throw ValidationError("DuffingParams: coefficients must be finite");
  }
}

void NoiseConfig::validate() const {
  if (level < 0.0) throw ValidationError("NoiseConfig: level must be non-negative");
  if (filter_order < 1) throw ValidationError("NoiseConfig: filter_order must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw ValidationError("NoiseConfig: sample_rate_hz must be positive");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * sample_rate_hz) {
    throw ValidationError("NoiseConfig: cutoff_hz must lie in (0, sample_rate_hz/2)");
  }
}

double BiquadCascade::process(double u) {
  if (z1_.size() != sections.size()) {
    z1_.assign(sections.size(), 0.0);
    z2_.assign(sections.size(), 0.0);
  }
  double y = u;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const Section& s = sections[i];
    const double in = y;
    y = s.b0 * in + z1_[i];
    z1_[i] = s.b1 * in - s.a1 * y + z2_[i];
    z2_[i] = s.b2 * in - s.a2 * y;
  }
  return y;
}

void BiquadCascade::reset() {
  z1_.assign(sections.size(), 0.0);
  z2_.assign(sections.size(), 0.0);
}

BiquadCascade design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1) throw ValidationError("butterworth: order must be >= 1");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * sample_rate_hz) {
    throw ValidationError("butterworth: cutoff must lie in (0, Nyquist)");
  }
  const double fs2 = 2.0 * sample_rate_hz;
  const double wc = fs2 * std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);

  BiquadCascade filt;
  for (int k = 1; k <= order / 2; ++k) {
    const double alpha = std::sin((2.0 * k - 1.0) * std::numbers::pi / (2.0 * order));
    const double den = fs2 * fs2 + 2.0 * alpha * wc * fs2 + wc * wc;
    filt.sections.push_back({
        wc * wc / den,
        2.0 * wc * wc / den,
        wc * wc / den,
        (2.0 * wc * wc - 2.0 * fs2 * fs2) / den,
        (fs2 * fs2 - 2.0 * alpha * wc * fs2 + wc * wc) / den,
    });
  }
  if (order % 2 == 1) {
    const double den = fs2 + wc;
    filt.sections.push_back({wc / den, wc / den, 0.0, (wc - fs2) / den, 0.0});
  }
  filt.reset();
  return filt;
}

std::vector<double> make_noise(const NoiseConfig& config, double duration) {
  config.validate();
  if (!(duration > 0.0)) throw ValidationError("make_noise: duration must be positive");

  const auto n = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(duration * config.sample_rate_hz)));
  std::vector<double> out(n, 0.0);
  if (config.level == 0.0) return out;

  std::mt19937_64 rng(config.seed);
  BiquadCascade filt =
      design_butterworth_lowpass(config.filter_order, config.cutoff_hz, config.sample_rate_hz);

  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // uniform in [-1, 1), mapped from raw bits so the stream is identical
    // across standard libraries
    const double u = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    out[i] = filt.process(u);
    sq += out[i] * out[i];
  }
  const double rms = std::sqrt(sq / static_cast<double>(n));
  const double scale = rms > 0.0 ? config.level / rms : 0.0;
  for (double& v : out) v *= scale;
  return out;
}

PlantSim::PlantSim(const DuffingParams& params, const NoiseConfig& noise, PlantState init,
                   SimOptions options)
    : params_(params), noise_cfg_(noise), state_(init), options_(options) {
  params_.validate();
  noise_cfg_.validate();
  if (!(options_.dt > 0.0)) throw ValidationError("PlantSim: dt must be positive");
  // At least 50 integrator steps per natural period.
  if (options_.dt > 1.0 / (50.0 * params_.f_n_hz())) {
    throw ValidationError("PlantSim: dt too coarse, need >= 50 steps per natural period");
  }
  if (noise_cfg_.level > 0.0) {
    noise_ = make_noise(noise_cfg_, options_.noise_pool_s);
    noise_dt_ = 1.0 / noise_cfg_.sample_rate_hz;
  }
}

double PlantSim::noise_at(double t) const {
  if (noise_.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(std::floor(t / noise_dt_));
  return noise_[idx % noise_.size()];
}

double PlantSim::current_noise() const { return noise_at(state_.t); }

double PlantSim::base_accel_output(double forcing_now) const {
  if (options_.shaker.enabled) return shaker_y_;
  return forcing_now / (options_.c_a_true * params_.omega_n * params_.omega_n);
}

double PlantSim::accel(double x, double v, double force) const {
  return force - params_.b * v - params_.restoring(x);
}

void PlantSim::step(const std::function<double(double)>& smooth_force, double held_force) {
  const double dt = options_.dt;
  const double t = state_.t;
  const double t_half = t + 0.5 * dt;
  const double t_end = t + dt;

  const double f0 = smooth_force(t) + held_force + noise_at(t);
  const double fh = smooth_force(t_half) + held_force + noise_at(t_half);
  const double f1 = smooth_force(t_end) + held_force + noise_at(t_end);

  const double x = state_.x;
  const double v = state_.v;

  const double k1x = v;
  const double k1v = accel(x, v, f0);
  const double k2x = v + 0.5 * dt * k1v;
  const double k2v = accel(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v, fh);
  const double k3x = v + 0.5 * dt * k2v;
  const double k3v = accel(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v, fh);
  const double k4x = v + dt * k3v;
  const double k4v = accel(x + dt * k3x, v + dt * k3v, f1);

  state_.x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  state_.v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  state_.t = t_end;

  if (options_.shaker.enabled) {
    // One-way 2nd-order low-pass from forcing to the base-accel channel.
    const double wc = kTwoPi * options_.shaker.corner_hz;
    const double zs = options_.shaker.damping;
    const double ca_wn2 = options_.c_a_true * params_.omega_n * params_.omega_n;
    auto fdot = [&](double y, double yd, double u) {
      return wc * wc * (u - y) - 2.0 * zs * wc * yd;
    };
    const double u0 = (smooth_force(t) + held_force) / ca_wn2;
    const double uh = (smooth_force(t_half) + held_force) / ca_wn2;
    const double u1 = (smooth_force(t_end) + held_force) / ca_wn2;
    const double y = shaker_y_, yd = shaker_yd_;
    const double m1y = yd, m1v = fdot(y, yd, u0);
    const double m2y = yd + 0.5 * dt * m1v, m2v = fdot(y + 0.5 * dt * m1y, yd + 0.5 * dt * m1v, uh);
    const double m3y = yd + 0.5 * dt * m2v, m3v = fdot(y + 0.5 * dt * m2y, yd + 0.5 * dt * m2v, uh);
    const double m4y = yd + dt * m3v, m4v = fdot(y + dt * m3y, yd + dt * m3v, u1);
    shaker_y_ = y + dt / 6.0 * (m1y + 2.0 * m2y + 2.0 * m3y + m4y);
    shaker_yd_ = yd + dt / 6.0 * (m1v + 2.0 * m2v + 2.0 * m3v + m4v);
  }

  if (!std::isfinite(state_.x) || !std::isfinite(state_.v) ||
      std::abs(state_.x) > options_.x_limit) {
    throw BlowUpError("plant trajectory diverged at t = " + std::to_string(state_.t) + " s",
                      state_.t);
  }
}

void PlantSim::set_dt(double dt) {
  if (!(dt > 0.0) || dt > 1.0 / (50.0 * params_.f_n_hz())) {
    throw ValidationError("PlantSim::set_dt: invalid step size");
  }
  options_.dt = dt;
}

SimulationRecord simulate(const DuffingParams& params,
                          const std::function<double(double)>& forcing,
                          const NoiseConfig& noise, PlantState init, double duration,
                          double dt, const SimOptions& extra) {
  if (!(duration > 0.0)) throw ValidationError("simulate: duration must be positive");
  SimOptions opts = extra;
  opts.dt = dt;
  opts.noise_pool_s = duration + dt;  // exact-duration noise sequence
  PlantSim sim(params, noise, init, opts);

  const auto n_steps = static_cast<std::size_t>(std::llround(duration / dt));
  SimulationRecord rec;
  rec.dt = dt;
  rec.times.reserve(n_steps + 1);
  rec.x.reserve(n_steps + 1);
  rec.forcing.reserve(n_steps + 1);
  rec.base_accel.reserve(n_steps + 1);
  rec.noise.reserve(n_steps + 1);

  auto record = [&](double t) {
    const double f = forcing(t);
    rec.times.push_back(t);
    rec.x.push_back(sim.state().x);
    rec.forcing.push_back(f);
    rec.base_accel.push_back(sim.base_accel_output(f));
    rec.noise.push_back(sim.current_noise());
  };

  record(0.0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    sim.step(forcing);
    record(static_cast<double>(i + 1) * dt);
  }
  return rec;
}

}  // namespace cbclab
