#pragma once

#include <string>
#include <vector>

#include "cbclab/control.hpp"
#include "cbclab/harmonics.hpp"
#include "cbclab/plant.hpp"

namespace cbclab {

struct CbcSettings {
  double delta_b1 = 0.05;       // target fundamental increment per step
  double hh_tol_rel = 1e-3;     // accept when hh_norm <= max(rel*Phi, abs)
  double hh_tol_abs = 1e-9;
  int max_fp_iters = 10;        // measurement passes per correction
  int settle_periods = 50;
  int avg_periods = 10;
  bool correct_higher_harmonics = true;
  bool strict_acceptance = true;  // unconverged correction -> accepted = false
  int n_harm = 7;
  int steps_per_period = 500;   // controller ticks per forcing period

  void validate() const;
};

/// Projections of one steady-state measurement window.
struct Measurement {
  HarmonicCoeffs response;
  HarmonicCoeffs forcing;
  HarmonicCoeffs base_accel;
};

/// One accepted (or diagnosed) steady state of the sweep.
struct BranchPoint {
  double b1_target = 0.0;
  double phi = 0.0;             // fundamental forcing amplitude
  double base_accel_amp = 0.0;
  double x_amp = 0.0;
  double theta = 0.0;           // response phase relative to the forcing
  HarmonicCoeffs response;
  HarmonicCoeffs forcing;
  ControlTarget target;
  int fp_iters_used = 0;
  double hh_residual = 0.0;     // forcing higher-harmonic norm at acceptance
  bool accepted = true;
};

struct Branch {
  std::vector<BranchPoint> points;
  bool truncated = false;
  std::string diagnostic;
};

/// Closed-loop driver: discrete PD controller at steps_per_period ticks per
/// forcing period around the continuous plant. The open-loop fundamental
/// (a_open, b_open) is carried between branch points so the controller only
/// has to supply the increment.
class CbcRunner {
 public:
  CbcRunner(const DuffingParams& params, const NoiseConfig& noise, const SimOptions& sim,
            double omega, const ControlGains& gains, const CbcSettings& settings);

  /// Run settle_periods closed-loop periods, then project response, total
  /// forcing and base acceleration over avg_periods periods.
  Measurement measure_steady_state(const ControlTarget& target);

  struct CorrectionResult {
    ControlTarget target;
    Measurement measurement;
    bool converged = false;
    int iters = 0;                   // measurement passes used
    std::vector<double> hh_history;  // forcing hh norm after each pass
  };

  /// Fixed-point iteration moving the target's non-fundamental coefficients
  /// onto the measured response until the forcing is fundamental-only.
  CorrectionResult correct_higher_harmonics(ControlTarget target);

  void set_open_loop(double a_open, double b_open);
  double a_open() const { return a_open_; }
  double b_open() const { return b_open_; }
  const PlantState& plant_state() const;
  double omega() const { return omega_; }

 private:
  void tick(bool record);

  PlantSim plant_;
  double omega_;
  ControlGains gains_;
  CbcSettings settings_;
  double a_open_ = 0.0;
  double b_open_ = 0.0;
  const ControlTarget* active_target_ = nullptr;
  double x_prev_ = 0.0;
  std::vector<double> rec_x_, rec_f_, rec_base_;
};

/// Amplitude-sweep continuation: step the target fundamental from b1_start
/// toward b1_stop, settle, optionally correct higher harmonics, and record a
/// branch point per step. Plant state carries over between steps; a blow-up
/// truncates the branch with a diagnostic.
Branch run_amplitude_sweep(const DuffingParams& params, const NoiseConfig& noise,
                           const SimOptions& sim, double omega, double b1_start,
                           double b1_stop, const ControlGains& gains,
                           const CbcSettings& settings);

/// Forcing higher-harmonic norm of a coefficient set (no samples needed).
double higher_harmonic_norm(const HarmonicCoeffs& coeffs);

}  // namespace cbclab
