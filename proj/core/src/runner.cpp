#include "cbclab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "cbclab/analytic.hpp"
#include "cbclab/collocation.hpp"
#include "cbclab/continuation.hpp"
#include "cbclab/errors.hpp"
#include "cbclab/io.hpp"
#include "cbclab/version.hpp"

namespace cbclab {

namespace {

using nlohmann::json;

struct JobResult {
  std::vector<std::string> files;
  std::string failure;  // empty on success
};

// Fixed-size worker pool; every job writes into its own slot, so the merge
// order is the job order no matter how execution interleaves.
std::vector<JobResult> run_jobs(const std::vector<std::function<JobResult()>>& jobs,
                                int workers) {
  std::vector<JobResult> results(jobs.size());
  if (jobs.empty()) return results;
  workers = std::clamp<int>(workers, 1, static_cast<int>(jobs.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = jobs[i]();
      } catch (const std::exception& e) {
        results[i].failure = e.what();
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

struct StagePaths {
  std::filesystem::path root;

  std::filesystem::path analytic_scurve() const { return root / "analytic" / "scurve.csv"; }
  std::filesystem::path analytic_frf() const { return root / "analytic" / "frf.csv"; }
  std::filesystem::path colloc_amplitude() const { return root / "colloc" / "amplitude_branch.csv"; }
  std::filesystem::path colloc_frequency() const { return root / "colloc" / "frequency_branch.csv"; }
  std::filesystem::path linear_modal() const { return root / "sweep" / "linear_modal.json"; }

  std::filesystem::path sweep_csv(const std::string& level, std::uint64_t seed,
                                  const char* dir) const {
    return root / "sweep" / (level + "_" + seed_tag(seed) + "_" + dir + ".csv");
  }
  std::filesystem::path cbc_csv(const std::string& level, std::uint64_t seed) const {
    return root / "cbc" / (level + "_" + seed_tag(seed) + "_branch.csv");
  }
  std::filesystem::path cbc_json(const std::string& level, std::uint64_t seed) const {
    return root / "cbc" / (level + "_" + seed_tag(seed) + "_branch.json");
  }
  std::filesystem::path fit_json(const std::string& level, std::uint64_t seed,
                                 const std::string& source) const {
    return root / "identify" / (level + "_" + seed_tag(seed) + "_" + source + "_fit.json");
  }
  std::filesystem::path band_csv(const std::string& level, std::uint64_t seed,
                                 const std::string& source) const {
    return root / "identify" / (level + "_" + seed_tag(seed) + "_" + source + "_band.csv");
  }
};

bool stage_enabled(const RunRequest& req, const std::string& stage) {
  if (req.subcommand == stage) return true;
  if (req.subcommand != "full") return false;
  if (req.stage_filter && *req.stage_filter != stage) return false;
  return true;
}

JobResult run_analytic_stage(const Scenario& sc, const StagePaths& paths) {
  const TildeParams p{sc.plant.tilde.mu_t, sc.plant.tilde.nu_t, sc.plant.tilde.rho_t,
                      sc.plant.tilde.b_t, sc.cbc.freq_hz / sc.plant.f_n_hz};
  const auto grid = default_x_grid(sc.analytic.x_max, sc.analytic.grid_points);
  write_scurve_csv(paths.analytic_scurve(), s_curve(p, grid));

  std::vector<double> zetas(static_cast<std::size_t>(sc.analytic.frf_zeta_points));
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    zetas[i] = sc.analytic.frf_zeta_min +
               (sc.analytic.frf_zeta_max - sc.analytic.frf_zeta_min) *
                   static_cast<double>(i) / static_cast<double>(zetas.size() - 1);
  }
  const double wn2 = sc.omega_n() * sc.omega_n();
  const auto frf = frequency_response(p, sc.analytic.frf_forcing_wn2 / wn2, zetas,
                                      sc.analytic.x_max);
  write_frf_csv(paths.analytic_frf(), frf);
  return {{paths.analytic_scurve().string(), paths.analytic_frf().string()}, ""};
}

JobResult run_colloc_stage(const Scenario& sc, const StagePaths& paths) {
  const DuffingParams params = sc.duffing();
  const double omega = 2.0 * std::numbers::pi * sc.cbc.freq_hz;
  const double zeta = sc.cbc.freq_hz / sc.plant.f_n_hz;
  const TildeParams tp{sc.plant.tilde.mu_t, sc.plant.tilde.nu_t, sc.plant.tilde.rho_t,
                       sc.plant.tilde.b_t, zeta};

  ContinuationOptions copts;
  copts.colloc.n_harm = sc.colloc.n_harm;

  // Amplitude branch at the CBC frequency, seeded in the near-linear regime.
  {
    const double d0 = sc.colloc.delta_st_min;
    double x0 = d0 / std::hypot(zeta * zeta - 1.0, tp.b_t * zeta);
    const auto seed_guess = fundamental_guess(x0, phase_angle(x0, tp), omega, sc.colloc.n_harm);
    const PeriodicSolution seed = solve_periodic(params, d0, omega, seed_guess, copts.colloc);
    const auto branch = continue_branch(params, FreeParam::delta_st,
                                        {d0, sc.colloc.delta_st_max}, seed, copts);
    write_colloc_csv(paths.colloc_amplitude(), branch);
  }

  // Frequency branch at the configured forcing level.
  {
    const double wn2 = sc.omega_n() * sc.omega_n();
    const double d0 = sc.analytic.frf_forcing_wn2 / wn2;
    const double w_lo = sc.analytic.frf_zeta_min * sc.omega_n();
    const double w_hi = sc.analytic.frf_zeta_max * sc.omega_n();
    TildeParams tp_lo = tp;
    tp_lo.zeta = sc.analytic.frf_zeta_min;
    double x0 = d0 / std::hypot(tp_lo.zeta * tp_lo.zeta - 1.0, tp.b_t * tp_lo.zeta);
    const auto seed_guess =
        fundamental_guess(x0, phase_angle(x0, tp_lo), w_lo, sc.colloc.n_harm);
    const PeriodicSolution seed = solve_periodic(params, d0, w_lo, seed_guess, copts.colloc);
    const auto branch = continue_branch(params, FreeParam::omega, {w_lo, w_hi}, seed, copts);
    write_colloc_csv(paths.colloc_frequency(), branch);
  }

  return {{paths.colloc_amplitude().string(), paths.colloc_frequency().string()}, ""};
}

JobResult run_linear_modal(const Scenario& sc, const StagePaths& paths) {
  NoiseConfig quiet;  // level 0: the linear protocol runs without injected noise
  quiet.cutoff_hz = sc.noise.cutoff_hz;
  quiet.filter_order = sc.noise.filter_order;
  quiet.sample_rate_hz = sc.noise.sample_rate_hz;

  const LinearModal lm = estimate_linear_modal(
      sc.duffing(), quiet, sc.sim_options(), sc.linear_sweep.amp, sc.linear_sweep.f_start_hz,
      sc.linear_sweep.f_stop_hz, sc.linear_sweep.f_step_hz, sc.linear_sweep.settings);

  json j{{"f_n_hz", lm.f_n_hz},
         {"damping_ratio", lm.damping_ratio},
         {"peak_up_hz", lm.peak_up_hz},
         {"peak_down_hz", lm.peak_down_hz},
         {"nonlinearity_warning", lm.nonlinearity_warning}};
  std::filesystem::create_directories(paths.linear_modal().parent_path());
  std::ofstream out(paths.linear_modal());
  out << j.dump(2) << '\n';
  return {{paths.linear_modal().string()}, ""};
}

Dataset dataset_from_sweeps(const std::vector<SweepPoint>& up,
                            const std::vector<SweepPoint>& down, double f_n_hz,
                            const std::string& level) {
  Dataset d;
  d.source = "openloop";
  d.noise_tag = level;
  for (const auto* sweep : {&up, &down}) {
    for (const SweepPoint& p : *sweep) {
      d.points.push_back({p.base_accel_amp, p.freq_hz / f_n_hz, p.x_amp});
    }
  }
  return d;
}

Dataset dataset_from_branch(const Branch& branch, double zeta, const std::string& level) {
  Dataset d;
  d.source = "cbc";
  d.noise_tag = level;
  for (const BranchPoint& p : branch.points) {
    if (!p.accepted) continue;
    d.points.push_back({p.base_accel_amp, zeta, p.x_amp});
  }
  return d;
}

FitResult fit_dataset(const Scenario& sc, const Dataset& data) {
  ParamVector init = sc.identification.init;
  // Closed-form warm start for the scale factor: with the shape parameters
  // fixed, the optimal 1/c_a is a linear least-squares ratio.
  double num = 0.0, den = 0.0;
  for (const DataPoint& p : data.points) {
    const TildeParams tp{init.mu_t, init.nu_t, init.rho_t, init.b_t, p.zeta};
    const double d = static_deflection(p.x_amp, tp);
    num += d * d;
    den += p.a_base * d;
  }
  if (den > 0.0 && num > 0.0) {
    init.c_a = std::clamp(num / den, sc.identification.bounds.lower[4],
                          sc.identification.bounds.upper[4]);
  }
  return fit(data, init, sc.identification.bounds, sc.identification.options);
}

void write_band(const Scenario& sc, const FitResult& fr, const std::filesystem::path& path) {
  const double zeta = sc.cbc.freq_hz / sc.plant.f_n_hz;
  std::vector<double> grid;
  const int n = 101;
  grid.reserve(n);
  for (int i = 0; i < n; ++i) {
    grid.push_back(sc.analytic.x_max * static_cast<double>(i + 1) / static_cast<double>(n));
  }
  const auto band = confidence_band(fr, zeta, grid, 0.95);
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "x_amp,lower,upper\n";
  for (int i = 0; i < n; ++i) {
    out << format_g17(grid[static_cast<std::size_t>(i)]) << ','
        << format_g17(band[static_cast<std::size_t>(i)].first) << ','
        << format_g17(band[static_cast<std::size_t>(i)].second) << '\n';
  }
}

}  // namespace

CbcSettings cbc_settings_for_level(const Scenario& scenario, double multiplier) {
  CbcSettings s = scenario.cbc.settings;
  if (multiplier >= scenario.cbc.skip_correction_at_or_above) {
    s.correct_higher_harmonics = false;
  }
  if (multiplier >= scenario.cbc.lenient_at_or_above) {
    s.strict_acceptance = false;
  }
  return s;
}

RunManifest run_scenario(const RunRequest& request) {
  const auto t_begin = std::chrono::steady_clock::now();
  const Scenario& sc = request.scenario;
  {
    const auto violations = validate_scenario(sc);
    if (!violations.empty()) {
      std::string msg = "invalid scenario:";
      for (const auto& v : violations) msg += "\n  - " + v;
      throw ValidationError(msg);
    }
  }

  RunManifest manifest;
  manifest.scenario_name = sc.name;
  manifest.scenario_hash = scenario_hash(sc);
  manifest.version = kVersion;
  manifest.subcommand = request.subcommand;
  manifest.seeds = request.seed_override ? std::vector<std::uint64_t>{*request.seed_override}
                                         : sc.seeds;

  const StagePaths paths{request.out_root / sc.name};
  const std::vector<std::uint64_t>& seeds = manifest.seeds;
  const double zeta_cbc = sc.cbc.freq_hz / sc.plant.f_n_hz;

  struct LevelSeed {
    std::size_t level_idx;
    double multiplier;
    std::uint64_t seed;
  };
  std::vector<LevelSeed> pairs;
  for (std::size_t li = 0; li < sc.noise.ladder.size(); ++li) {
    for (std::uint64_t seed : seeds) pairs.push_back({li, sc.noise.ladder[li], seed});
  }

  auto add_stage = [&](const std::string& stage, const std::vector<JobResult>& results) {
    for (const JobResult& r : results) {
      if (!r.failure.empty()) {
        manifest.failures.push_back(stage + ": " + r.failure);
        manifest.ok = false;
      }
      for (const std::string& f : r.files) manifest.stage_files[stage].push_back(f);
    }
  };

  if (stage_enabled(request, "analytic")) {
    add_stage("analytic", run_jobs({[&] { return run_analytic_stage(sc, paths); }}, 1));
  }
  if (stage_enabled(request, "colloc")) {
    add_stage("colloc", run_jobs({[&] { return run_colloc_stage(sc, paths); }}, 1));
  }

  if (stage_enabled(request, "sweep")) {
    std::vector<std::function<JobResult()>> jobs;
    jobs.push_back([&] { return run_linear_modal(sc, paths); });
    for (const LevelSeed& ls : pairs) {
      jobs.push_back([&sc, &paths, ls] {
        const std::string label = sc.level_label(ls.multiplier);
        const double omega = 2.0 * std::numbers::pi * sc.amplitude_sweep.freq_hz;
        JobResult out;
        for (const char* dir : {"up", "down"}) {
          const bool is_up = std::string(dir) == "up";
          const NoiseConfig noise = sc.noise_config(
              ls.multiplier,
              derive_seed(ls.seed, ls.level_idx, std::string("openloop_") + dir));
          // A down sweep starts on the high-amplitude orbit: seed the state
          // from the closed-form response at the top of the range.
          std::optional<PlantState> init;
          if (!is_up) {
            const TildeParams tp{sc.plant.tilde.mu_t, sc.plant.tilde.nu_t,
                                 sc.plant.tilde.rho_t, sc.plant.tilde.b_t,
                                 sc.amplitude_sweep.freq_hz / sc.plant.f_n_hz};
            const double wn2 = sc.omega_n() * sc.omega_n();
            const auto roots =
                amplitude_roots(tp, sc.amplitude_sweep.stop / wn2, sc.analytic.x_max);
            if (!roots.empty()) {
              const double x_up = roots.back();
              const double th = phase_angle(x_up, tp);
              init = PlantState{x_up * std::cos(th), -x_up * omega * std::sin(th), 0.0};
            }
          }
          const SweepRecord rec = amplitude_sweep(
              sc.duffing(), noise, sc.sim_options(), omega, sc.amplitude_sweep.start,
              sc.amplitude_sweep.stop, sc.amplitude_sweep.step,
              is_up ? SweepDirection::up : SweepDirection::down, sc.amplitude_sweep.settings,
              init);
          const auto path = paths.sweep_csv(label, ls.seed, dir);
          write_sweep_csv(path, rec.points);
          out.files.push_back(path.string());
        }
        return out;
      });
    }
    add_stage("sweep", run_jobs(jobs, request.jobs));
  }

  if (stage_enabled(request, "cbc")) {
    std::vector<std::function<JobResult()>> jobs;
    for (const LevelSeed& ls : pairs) {
      jobs.push_back([&sc, &paths, ls] {
        const std::string label = sc.level_label(ls.multiplier);
        const double omega = 2.0 * std::numbers::pi * sc.cbc.freq_hz;
        const NoiseConfig noise =
            sc.noise_config(ls.multiplier, derive_seed(ls.seed, ls.level_idx, "cbc"));
        const CbcSettings settings = cbc_settings_for_level(sc, ls.multiplier);
        const Branch branch =
            run_amplitude_sweep(sc.duffing(), noise, sc.sim_options(), omega, sc.cbc.b1_start,
                                sc.cbc.b1_stop, sc.control, settings);
        const auto csv = paths.cbc_csv(label, ls.seed);
        const auto sidecar = paths.cbc_json(label, ls.seed);
        write_branch_csv(csv, branch);
        write_branch_sidecar_json(sidecar, branch);
        return JobResult{{csv.string(), sidecar.string()}, ""};
      });
    }
    add_stage("cbc", run_jobs(jobs, request.jobs));
  }

  if (stage_enabled(request, "identify")) {
    std::vector<std::function<JobResult()>> jobs;
    for (const LevelSeed& ls : pairs) {
      jobs.push_back([&sc, &paths, ls, zeta_cbc] {
        const std::string label = sc.level_label(ls.multiplier);
        JobResult out;
        // open-loop dataset from the sweep stage outputs
        {
          const auto up_path = paths.sweep_csv(label, ls.seed, "up");
          const auto down_path = paths.sweep_csv(label, ls.seed, "down");
          if (!std::filesystem::exists(up_path) || !std::filesystem::exists(down_path)) {
            throw ValidationError("identify: missing sweep outputs for " + label +
                                  (", " + seed_tag(ls.seed)) + "; run the sweep stage first");
          }
          const Dataset data = dataset_from_sweeps(read_sweep_csv(up_path),
                                                   read_sweep_csv(down_path),
                                                   sc.plant.f_n_hz, label);
          const FitResult fr = fit_dataset(sc, data);
          const auto fit_path = paths.fit_json(label, ls.seed, "openloop");
          write_fit_json(fit_path, fr);
          const auto band_path = paths.band_csv(label, ls.seed, "openloop");
          write_band(sc, fr, band_path);
          out.files.push_back(fit_path.string());
          out.files.push_back(band_path.string());
        }
        // CBC dataset from the cbc stage outputs
        {
          const auto branch_path = paths.cbc_csv(label, ls.seed);
          if (!std::filesystem::exists(branch_path)) {
            throw ValidationError("identify: missing cbc output for " + label +
                                  (", " + seed_tag(ls.seed)) + "; run the cbc stage first");
          }
          const Dataset data =
              dataset_from_branch(read_branch_csv(branch_path), zeta_cbc, label);
          const FitResult fr = fit_dataset(sc, data);
          const auto fit_path = paths.fit_json(label, ls.seed, "cbc");
          write_fit_json(fit_path, fr);
          const auto band_path = paths.band_csv(label, ls.seed, "cbc");
          write_band(sc, fr, band_path);
          out.files.push_back(fit_path.string());
          out.files.push_back(band_path.string());
        }
        return out;
      });
    }
    add_stage("identify", run_jobs(jobs, request.jobs));
  }

  if (request.subcommand == "full" && !request.stage_filter) {
    const TableExport te = export_table({manifest}, sc, paths.root);
    manifest.stage_files["table"].push_back(te.table_csv.string());
    manifest.stage_files["table"].push_back(te.comparison_json.string());
    for (const std::string& w : te.warnings) manifest.failures.push_back("table: " + w);
  }

  manifest.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  write_manifest(paths.root / ("manifest_" + request.subcommand + ".json"), manifest);
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json j;
  j["scenario_name"] = manifest.scenario_name;
  j["scenario_hash"] = manifest.scenario_hash;
  j["version"] = manifest.version;
  j["subcommand"] = manifest.subcommand;
  j["seeds"] = manifest.seeds;
  j["stage_files"] = manifest.stage_files;
  j["failures"] = manifest.failures;
  j["wall_clock_s"] = manifest.wall_clock_s;
  j["ok"] = manifest.ok;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest: " + path.string());
  json j;
  in >> j;
  RunManifest m;
  m.scenario_name = j.at("scenario_name").get<std::string>();
  m.scenario_hash = j.at("scenario_hash").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.subcommand = j.at("subcommand").get<std::string>();
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.stage_files =
      j.at("stage_files").get<std::map<std::string, std::vector<std::string>>>();
  m.failures = j.at("failures").get<std::vector<std::string>>();
  m.wall_clock_s = j.at("wall_clock_s").get<double>();
  m.ok = j.at("ok").get<bool>();
  return m;
}

TableExport export_table(const std::vector<RunManifest>& manifests, const Scenario& scenario,
                         const std::filesystem::path& out_dir) {
  TableExport te;
  te.table_csv = out_dir / "table.csv";
  te.comparison_json = out_dir / "comparison.json";

  // Collect identify outputs, keyed (level label, source) -> fits.
  std::map<std::pair<std::string, std::string>, std::vector<FitResult>> fits;
  bool any_identify = false;
  for (const RunManifest& m : manifests) {
    auto it = m.stage_files.find("identify");
    if (it == m.stage_files.end()) {
      te.warnings.push_back("manifest " + m.scenario_name + "/" + m.subcommand +
                            " has no identify stage; skipped");
      continue;
    }
    any_identify = true;
    for (const std::string& f : it->second) {
      if (f.size() < 9 || f.substr(f.size() - 9) != "_fit.json") continue;
      const std::filesystem::path p(f);
      const std::string stem = p.stem().string();  // N4_seed7_cbc_fit
      const auto first = stem.find('_');
      const auto last = stem.rfind("_fit");
      if (first == std::string::npos || last == std::string::npos) continue;
      const std::string level = stem.substr(0, first);
      std::string rest = stem.substr(first + 1, last - first - 1);  // seed7_cbc
      const auto mid = rest.find('_');
      if (mid == std::string::npos) continue;
      const std::string source = rest.substr(mid + 1);
      try {
        fits[{level, source}].push_back(read_fit_json(p));
      } catch (const std::exception& e) {
        te.warnings.push_back(std::string("unreadable fit: ") + f + ": " + e.what());
      }
    }
  }

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(te.table_csv);
  csv << "noise,source,mu_t,estd_mu,nu_t,estd_nu,rho_t,estd_rho,b_t,estd_b,c_a,estd_ca,"
         "scatter_mu,scatter_nu,scatter_rho,scatter_b,scatter_ca,n_seeds\n";

  json comparison;
  comparison["scenario"] = scenario.name;
  comparison["truth"] = {{"mu_t", scenario.plant.tilde.mu_t},
                         {"nu_t", scenario.plant.tilde.nu_t},
                         {"rho_t", scenario.plant.tilde.rho_t},
                         {"b_t", scenario.plant.tilde.b_t},
                         {"c_a", scenario.plant.c_a_true}};
  comparison["levels"] = json::object();

  // Ladder order first, then source alphabetically: deterministic rows.
  for (double mult : scenario.noise.ladder) {
    const std::string level = scenario.level_label(mult);
    for (const char* source : {"cbc", "openloop"}) {
      auto it = fits.find({level, source});
      if (it == fits.end()) continue;
      const auto& fr = it->second;
      const std::size_t n = fr.size();
      std::array<double, 5> mean_idv{}, mean_estd{}, scatter{};
      for (const FitResult& f : fr) {
        const auto p = f.p_star.to_array();
        for (int k = 0; k < 5; ++k) {
          mean_idv[k] += p[k] / static_cast<double>(n);
          mean_estd[k] += f.estd[k] / static_cast<double>(n);
        }
      }
      for (const FitResult& f : fr) {
        const auto p = f.p_star.to_array();
        for (int k = 0; k < 5; ++k) {
          scatter[k] += (p[k] - mean_idv[k]) * (p[k] - mean_idv[k]);
        }
      }
      for (int k = 0; k < 5; ++k) {
        scatter[k] = n > 1 ? std::sqrt(scatter[k] / static_cast<double>(n - 1)) : 0.0;
      }

      csv << level << ',' << source;
      for (int k = 0; k < 5; ++k) {
        csv << ',' << format_g17(mean_idv[k]) << ',' << format_g17(mean_estd[k]);
      }
      for (int k = 0; k < 5; ++k) csv << ',' << format_g17(scatter[k]);
      csv << ',' << n << '\n';

      const double truth_mu = scenario.plant.tilde.mu_t;
      std::vector<double> abs_bias;
      abs_bias.reserve(n);
      for (const FitResult& f : fr) abs_bias.push_back(std::abs(f.p_star.mu_t - truth_mu));
      std::sort(abs_bias.begin(), abs_bias.end());
      const double median_bias = abs_bias[abs_bias.size() / 2];
      comparison["levels"][level][source] = {{"mu_t_mean", mean_idv[0]},
                                             {"mu_t_bias_median", median_bias},
                                             {"mu_t_scatter", scatter[0]},
                                             {"n_seeds", n}};
    }
  }
  csv.close();

  std::ofstream cj(te.comparison_json);
  cj << comparison.dump(2) << '\n';

  if (!any_identify && fits.empty()) {
    te.warnings.push_back("no identify results found; table has header only");
  }
  return te;
}

}  // namespace cbclab
