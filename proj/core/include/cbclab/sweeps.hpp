#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbclab/plant.hpp"

namespace cbclab {

enum class SweepDirection { up, down };

struct SweepPoint {
  double freq_hz = 0.0;
  double forcing_amp = 0.0;     // realized fundamental forcing amplitude
  double base_accel_amp = 0.0;
  double x_amp = 0.0;
  double theta = 0.0;
  bool jumped = false;
};

/// Sweep output; a trajectory escape truncates the point list and leaves the
/// diagnostic here.
struct SweepRecord {
  std::vector<SweepPoint> points;
  bool truncated = false;
  std::string diagnostic;
};

struct SweepSettings {
  int settle_periods = 50;  // dwell before measuring, per point
  int avg_periods = 10;
  int n_harm = 7;
  int steps_per_period = 500;
  double jump_factor = 5.0;  // |dX| > factor * median |dX| flags a jump

  void validate() const;
};

/// Open-loop frequency sweep at fixed forcing amplitude. State and forcing
/// phase carry over between points; a blow-up truncates the record.
SweepRecord frequency_sweep(const DuffingParams& params, const NoiseConfig& noise,
                            const SimOptions& sim, double forcing_amp, double f_start_hz,
                            double f_stop_hz, double f_step_hz, SweepDirection direction,
                            const SweepSettings& settings);

/// Open-loop amplitude sweep at fixed angular frequency. `init` seeds the
/// plant state; a down sweep typically starts on the high-amplitude orbit,
/// since the rig cannot reach it from rest without a violent transient.
SweepRecord amplitude_sweep(const DuffingParams& params, const NoiseConfig& noise,
                            const SimOptions& sim, double omega, double amp_start,
                            double amp_stop, double amp_step, SweepDirection direction,
                            const SweepSettings& settings,
                            std::optional<PlantState> init = std::nullopt);

struct LinearModal {
  double f_n_hz = 0.0;
  double damping_ratio = 0.0;
  double peak_up_hz = 0.0;
  double peak_down_hz = 0.0;
  bool nonlinearity_warning = false;  // cubic restoring > 1% of linear at peak
};

/// Low-amplitude up/down frequency sweeps, peak-locus averaging, and the
/// 3 dB bandwidth damping estimate.
LinearModal estimate_linear_modal(const DuffingParams& params, const NoiseConfig& noise,
                                  const SimOptions& sim, double low_amp, double f_start_hz,
                                  double f_stop_hz, double f_step_hz,
                                  const SweepSettings& settings);

}  // namespace cbclab
