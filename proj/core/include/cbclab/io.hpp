#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cbclab/analytic.hpp"
#include "cbclab/collocation.hpp"
#include "cbclab/continuation.hpp"
#include "cbclab/identification.hpp"
#include "cbclab/plant.hpp"
#include "cbclab/sweeps.hpp"

namespace cbclab {

/// Shortest round-trippable decimal form (17 significant digits).
std::string format_g17(double v);

void write_simulation_csv(const std::filesystem::path& path, const SimulationRecord& rec);

void write_branch_csv(const std::filesystem::path& path, const Branch& branch);
void write_branch_sidecar_json(const std::filesystem::path& path, const Branch& branch);
Branch read_branch_csv(const std::filesystem::path& path);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& pts);
std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path);

void write_scurve_csv(const std::filesystem::path& path,
                      const std::vector<ResponsePoint>& pts);
void write_frf_csv(const std::filesystem::path& path,
                   const std::vector<FrequencyResponseSlice>& slices);

void write_colloc_csv(const std::filesystem::path& path,
                      const std::vector<PeriodicSolution>& branch);

void write_fit_json(const std::filesystem::path& path, const FitResult& fit);
FitResult read_fit_json(const std::filesystem::path& path);

/// Flat record of a coefficient set: omega, n_harm, a0, a1..aN, b1..bN.
std::string harmonic_coeffs_csv_row(const HarmonicCoeffs& c);

}  // namespace cbclab
