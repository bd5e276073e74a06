#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cbclab/continuation.hpp"
#include "cbclab/identification.hpp"
#include "cbclab/plant.hpp"
#include "cbclab/sweeps.hpp"

namespace cbclab {

/// Everything one virtual-experiment campaign needs: plant truth, noise
/// ladder, control settings, sweep grids, identification setup and seeds.
struct Scenario {
  int schema_version = 1;
  std::string name = "unnamed";

  struct Plant {
    double f_n_hz = 19.95;
    DuffingParams::Tilde tilde;
    double c_a_true = 0.025;
    double x_limit = 30.0;
    ShakerFilter shaker;
  } plant;

  struct Noise {
    double cutoff_hz = 50.0;
    int filter_order = 2;
    double sample_rate_hz = 5000.0;
    double sigma1 = 85.0;           // reference RMS force of level multiplier 1
    std::vector<double> ladder{0};  // level multipliers, e.g. 0,2,4,...
  } noise;

  ControlGains control{19000.0, 8.0};

  struct Cbc {
    double freq_hz = 24.0;
    double b1_start = 0.05;
    double b1_stop = 2.4;
    CbcSettings settings;
    double skip_correction_at_or_above = 1e9;  // ladder multiplier threshold
    double lenient_at_or_above = 1e9;
  } cbc;

  struct AmplitudeSweep {
    double freq_hz = 24.0;
    double start = 100.0;
    double stop = 4400.0;
    double step = 100.0;
    SweepSettings settings;
  } amplitude_sweep;

  struct LinearSweep {
    double f_start_hz = 19.0;
    double f_stop_hz = 21.0;
    double f_step_hz = 0.1;
    double amp = 2.5;
    SweepSettings settings;
  } linear_sweep;

  struct Analytic {
    double x_max = 2.6;
    int grid_points = 2000;
    double fold_x_min = 0.01;
    double fold_x_max = 2.5;
    double frf_forcing_wn2 = 0.7;  // delta_st * omega_n^2 of the FRF cut
    double frf_zeta_min = 0.95;
    double frf_zeta_max = 1.06;
    int frf_zeta_points = 111;
  } analytic;

  struct Colloc {
    int n_harm = 15;
    double delta_st_min = 2e-3;
    double delta_st_max = 0.32;
  } colloc;

  struct Identification {
    ParamVector init{0.5, 0.0, 0.0, 0.02, 0.05};
    FitBounds bounds;
    FitOptions options;
  } identification;

  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";

  // Derived helpers.
  double omega_n() const;
  DuffingParams duffing() const;
  SimOptions sim_options() const;
  NoiseConfig noise_config(double ladder_multiplier, std::uint64_t seed) const;
  std::string level_label(double multiplier) const;  // "N0", "N2", ...
};

/// Parse a scenario JSON file. Collects every schema violation (with its
/// field path) into a single ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

/// Validate an in-memory scenario; returns violations, empty when valid.
std::vector<std::string> validate_scenario(const Scenario& s);

/// FNV-1a hash of the canonical serialized form, hex-encoded.
std::string scenario_hash(const Scenario& s);

/// Canonical JSON text of a scenario (sorted keys, full precision).
std::string scenario_to_json(const Scenario& s);

/// Deterministic per-run noise seed derived from (base seed, level, stream).
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t level_index,
                          const std::string& stream);

}  // namespace cbclab
