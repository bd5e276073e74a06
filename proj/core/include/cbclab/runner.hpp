#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbclab/scenario.hpp"

namespace cbclab {

/// Record of one run_scenario invocation: what was produced and from what.
struct RunManifest {
  std::string scenario_name;
  std::string scenario_hash;
  std::string version;
  std::string subcommand;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::vector<std::string>> stage_files;  // stage -> paths
  std::vector<std::string> failures;
  double wall_clock_s = 0.0;
  bool ok = true;
};

struct RunRequest {
  Scenario scenario;
  std::string subcommand = "full";  // sweep|cbc|analytic|colloc|identify|full
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> stage_filter;  // restrict `full` to one stage
  int jobs = 1;
  std::filesystem::path out_root;  // resolved output root directory
};

/// Execute the requested stage(s) for every (noise level, seed) pair and
/// write CSV/JSON artifacts plus a manifest. Jobs run on a bounded worker
/// pool; outputs merge in job-key order, so identical inputs give
/// byte-identical CSVs.
RunManifest run_scenario(const RunRequest& request);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

/// Aggregate identify-stage results from a set of manifests into a
/// per-(noise level, source) parameter table CSV plus a comparison JSON with
/// per-level bias summaries. Missing stages are listed and skipped.
struct TableExport {
  std::filesystem::path table_csv;
  std::filesystem::path comparison_json;
  std::vector<std::string> warnings;
};
TableExport export_table(const std::vector<RunManifest>& manifests,
                         const Scenario& scenario, const std::filesystem::path& out_dir);

/// CBC settings for one ladder level (correction/acceptance policy applied).
CbcSettings cbc_settings_for_level(const Scenario& scenario, double multiplier);

}  // namespace cbclab
