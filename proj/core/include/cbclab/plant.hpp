#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace cbclab {

/// Parameters of the linearly damped seventh-order oscillator
///
///   x'' + b x' + wn^2 x + mu x^3 + nu x^5 + rho x^7 = F(t) + w(t)
struct DuffingParams {
  double omega_n = 1.0;  // linear natural angular frequency, rad/s
  double b = 0.0;        // viscous damping, 1/s
  double mu = 0.0;       // cubic coefficient
  double nu = 0.0;       // quintic coefficient
  double rho = 0.0;      // septic coefficient

  /// Frequency-normalized view: b_t = b/wn, mu_t = mu/wn^2, ...
  struct Tilde {
    double mu_t = 0.0, nu_t = 0.0, rho_t = 0.0, b_t = 0.0;
  };
  Tilde tilde() const;
  static DuffingParams from_tilde(double omega_n, const Tilde& t);

  double f_n_hz() const;

  /// Restoring acceleration wn^2 x + mu x^3 + nu x^5 + rho x^7.
  double restoring(double x) const;
  /// d(restoring)/dx, used by variational/Jacobian code.
  double restoring_derivative(double x) const;

  void validate() const;
};

/// Band-limited process-noise description. Identical configs reproduce
/// bit-identical sequences.
struct NoiseConfig {
  double level = 0.0;           // RMS of the generated force sequence; 0 disables
  double cutoff_hz = 50.0;      // Butterworth low-pass cutoff
  int filter_order = 2;         // >= 1
  double sample_rate_hz = 5000.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlantState {
  double x = 0.0;
  double v = 0.0;
  double t = 0.0;
};

/// Uniformly sampled channels of one simulation run.
struct SimulationRecord {
  std::vector<double> times;
  std::vector<double> x;           // response (strain-gauge analogue)
  std::vector<double> forcing;     // applied F(t), excluding process noise
  std::vector<double> base_accel;  // synthetic base-acceleration channel
  std::vector<double> noise;       // injected noise w(t)
  double dt = 0.0;
};

/// Biquad cascade for the noise shaping filter.
struct BiquadCascade {
  struct Section {
    double b0, b1, b2, a1, a2;  // y = b0 u + b1 u1 + b2 u2 - a1 y1 - a2 y2
  };
  std::vector<Section> sections;

  double process(double u);
  void reset();

 private:
  std::vector<double> z1_, z2_;  // DF2T state, sized lazily
};

/// Low-pass Butterworth design via bilinear transform with prewarping.
/// Unit DC gain. Throws ValidationError when cutoff >= Nyquist.
BiquadCascade design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz);

/// Seeded band-limited noise: i.i.d. uniform drive through the Butterworth
/// low-pass, rescaled so the RMS of the returned sequence equals level.
std::vector<double> make_noise(const NoiseConfig& config, double duration);

/// Optional second-order low-pass between applied forcing and the
/// base-acceleration channel (unit DC gain).
struct ShakerFilter {
  bool enabled = false;
  double corner_hz = 30.0;
  double damping = 0.7;
};

struct SimOptions {
  double dt = 1e-4;           // integrator step
  double x_limit = 1e4;       // |x| beyond this aborts as blow-up
  double c_a_true = 0.025;    // base-accel proportionality: a_base = F/(c_a wn^2)
  double noise_pool_s = 600.0;  // length of the pre-generated noise sequence
  ShakerFilter shaker;
};

/// Step-by-step closed- or open-loop integration of the plant with
/// zero-order-hold process noise. Forces are supplied per step: a smooth
/// part evaluated at the RK4 stage times plus a held part (control demand).
class PlantSim {
 public:
  PlantSim(const DuffingParams& params, const NoiseConfig& noise, PlantState init,
           SimOptions options);

  /// Advance one step dt. smooth_force is evaluated at stage times
  /// t, t+dt/2, t+dt; held_force is constant over the step.
  void step(const std::function<double(double)>& smooth_force, double held_force = 0.0);

  const PlantState& state() const { return state_; }
  double dt() const { return options_.dt; }
  const DuffingParams& params() const { return params_; }
  const SimOptions& options() const { return options_; }

  /// Noise value held over the step starting at the current time.
  double current_noise() const;
  /// Base-acceleration channel value for a given applied forcing value at the
  /// current time (advances no state; the filter state moves inside step()).
  double base_accel_output(double forcing_now) const;

  /// Change the step size mid-run (frequency sweeps re-grid per point).
  void set_dt(double dt);

 private:
  double noise_at(double t) const;
  double accel(double x, double v, double force) const;

  DuffingParams params_;
  NoiseConfig noise_cfg_;
  PlantState state_;
  SimOptions options_;

  std::vector<double> noise_;   // generated lazily in chunks
  double noise_dt_ = 0.0;

  // shaker filter state (2nd-order ODE, integrated with the same RK4 grid)
  double shaker_y_ = 0.0;
  double shaker_yd_ = 0.0;
};

/// Batch convenience: integrate with a time-indexed force provider and record
/// every channel at the step grid.
SimulationRecord simulate(const DuffingParams& params,
                          const std::function<double(double)>& forcing,
                          const NoiseConfig& noise, PlantState init, double duration,
                          double dt, const SimOptions& extra = {});

}  // namespace cbclab
