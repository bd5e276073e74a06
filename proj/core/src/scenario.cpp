#include "cbclab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {

using nlohmann::json;

// Fetch helpers accumulating field-path diagnostics instead of throwing on
// the first problem.
struct Reader {
  std::vector<std::string>& errors;

  template <typename T>
  void get(const json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) return;  // keep default
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      errors.push_back(path + key + ": wrong type");
    }
  }
};

json tilde_to_json(const DuffingParams::Tilde& t) {
  return json{{"mu_t", t.mu_t}, {"nu_t", t.nu_t}, {"rho_t", t.rho_t}, {"b_t", t.b_t}};
}

void tilde_from_json(Reader& r, const json& j, const std::string& path,
                     DuffingParams::Tilde& t) {
  r.get(j, path, "mu_t", t.mu_t);
  r.get(j, path, "nu_t", t.nu_t);
  r.get(j, path, "rho_t", t.rho_t);
  r.get(j, path, "b_t", t.b_t);
}

void sweep_settings_from_json(Reader& r, const json& j, const std::string& path,
                              SweepSettings& s) {
  r.get(j, path, "settle_periods", s.settle_periods);
  r.get(j, path, "avg_periods", s.avg_periods);
  r.get(j, path, "n_harm", s.n_harm);
  r.get(j, path, "steps_per_period", s.steps_per_period);
  r.get(j, path, "jump_factor", s.jump_factor);
}

}  // namespace

double Scenario::omega_n() const { return 2.0 * std::numbers::pi * plant.f_n_hz; }

DuffingParams Scenario::duffing() const {
  return DuffingParams::from_tilde(omega_n(), plant.tilde);
}

SimOptions Scenario::sim_options() const {
  SimOptions o;
  o.x_limit = plant.x_limit;
  o.c_a_true = plant.c_a_true;
  o.shaker = plant.shaker;
  return o;
}

NoiseConfig Scenario::noise_config(double ladder_multiplier, std::uint64_t seed) const {
  NoiseConfig c;
  c.level = ladder_multiplier * noise.sigma1;
  c.cutoff_hz = noise.cutoff_hz;
  c.filter_order = noise.filter_order;
  c.sample_rate_hz = noise.sample_rate_hz;
  c.seed = seed;
  return c;
}

std::string Scenario::level_label(double multiplier) const {
  std::ostringstream os;
  os << 'N' << multiplier;
  return os.str();
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> e;
  if (s.schema_version != 1) e.push_back("schema_version: expected 1");
  if (!(s.plant.f_n_hz > 0.0)) e.push_back("plant.f_n_hz: must be positive");
  if (!(s.plant.c_a_true > 0.0)) e.push_back("plant.c_a_true: must be positive");
  if (!(s.plant.x_limit > 0.0)) e.push_back("plant.x_limit: must be positive");
  if (!(s.noise.cutoff_hz > 0.0) || s.noise.cutoff_hz >= 0.5 * s.noise.sample_rate_hz) {
    e.push_back("noise.cutoff_hz: must lie in (0, sample_rate_hz/2)");
  }
  if (s.noise.filter_order < 1) e.push_back("noise.filter_order: must be >= 1");
  if (!(s.noise.sigma1 >= 0.0)) e.push_back("noise.sigma1: must be non-negative");
  if (s.noise.ladder.empty()) e.push_back("noise.ladder: must not be empty");
  for (double m : s.noise.ladder) {
    if (m < 0.0) {
      e.push_back("noise.ladder: multipliers must be non-negative");
      break;
    }
  }
  if (!(s.cbc.freq_hz > 0.0)) e.push_back("cbc.freq_hz: must be positive");
  if (s.cbc.settings.delta_b1 == 0.0) e.push_back("cbc.delta_b1: must be nonzero");
  if (s.cbc.settings.settle_periods < 1) e.push_back("cbc.settle_periods: must be >= 1");
  if (s.cbc.settings.avg_periods < 1) e.push_back("cbc.avg_periods: must be >= 1");
  if (s.cbc.settings.max_fp_iters < 1) e.push_back("cbc.max_fp_iters: must be >= 1");
  if (!(s.amplitude_sweep.step > 0.0)) e.push_back("sweeps.amplitude.step: must be positive");
  if (!(s.amplitude_sweep.stop >= s.amplitude_sweep.start)) {
    e.push_back("sweeps.amplitude.stop: must be >= start");
  }
  if (!(s.linear_sweep.f_step_hz > 0.0)) e.push_back("sweeps.linear.f_step_hz: must be positive");
  if (!(s.linear_sweep.f_stop_hz > s.linear_sweep.f_start_hz)) {
    e.push_back("sweeps.linear.f_stop_hz: must be > f_start_hz");
  }
  if (!(s.analytic.x_max > 0.0)) e.push_back("analytic.x_max: must be positive");
  if (s.analytic.grid_points < 8) e.push_back("analytic.grid_points: must be >= 8");
  if (!(s.analytic.fold_x_max > s.analytic.fold_x_min) || !(s.analytic.fold_x_min > 0.0)) {
    e.push_back("analytic.fold_x_min/fold_x_max: need 0 < min < max");
  }
  if (!(s.analytic.frf_forcing_wn2 > 0.0)) e.push_back("analytic.frf_forcing_wn2: must be positive");
  if (s.colloc.n_harm < 7) e.push_back("colloc.n_harm: must be >= 7");
  if (!(s.colloc.delta_st_max > s.colloc.delta_st_min) || !(s.colloc.delta_st_min > 0.0)) {
    e.push_back("colloc.delta_st_min/delta_st_max: need 0 < min < max");
  }
  if (!(s.identification.init.c_a != 0.0)) e.push_back("identification.init.c_a: must be nonzero");
  for (int i = 0; i < 5; ++i) {
    if (!(s.identification.bounds.lower[i] <= s.identification.bounds.upper[i])) {
      e.push_back("identification.bounds: lower must be <= upper");
      break;
    }
  }
  if (s.seeds.empty()) e.push_back("seeds: must not be empty");
  if (s.out_dir.empty()) e.push_back("out_dir: must not be empty");
  return e;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ValidationError("scenario parse error: " + std::string(ex.what()));
  }

  Scenario s;
  std::vector<std::string> errors;
  Reader r{errors};

  r.get(j, "", "schema_version", s.schema_version);
  r.get(j, "", "name", s.name);

  if (j.contains("plant")) {
    const json& p = j["plant"];
    r.get(p, "plant.", "f_n_hz", s.plant.f_n_hz);
    if (p.contains("tilde")) tilde_from_json(r, p["tilde"], "plant.tilde.", s.plant.tilde);
    r.get(p, "plant.", "c_a_true", s.plant.c_a_true);
    r.get(p, "plant.", "x_limit", s.plant.x_limit);
    if (p.contains("shaker_filter")) {
      const json& sf = p["shaker_filter"];
      r.get(sf, "plant.shaker_filter.", "enabled", s.plant.shaker.enabled);
      r.get(sf, "plant.shaker_filter.", "corner_hz", s.plant.shaker.corner_hz);
      r.get(sf, "plant.shaker_filter.", "damping", s.plant.shaker.damping);
    }
  }

  if (j.contains("noise")) {
    const json& n = j["noise"];
    r.get(n, "noise.", "cutoff_hz", s.noise.cutoff_hz);
    r.get(n, "noise.", "filter_order", s.noise.filter_order);
    r.get(n, "noise.", "sample_rate_hz", s.noise.sample_rate_hz);
    r.get(n, "noise.", "sigma1", s.noise.sigma1);
    r.get(n, "noise.", "ladder", s.noise.ladder);
  }

  if (j.contains("control")) {
    const json& c = j["control"];
    r.get(c, "control.", "kp", s.control.kp);
    r.get(c, "control.", "kd", s.control.kd);
  }

  if (j.contains("cbc")) {
    const json& c = j["cbc"];
    r.get(c, "cbc.", "freq_hz", s.cbc.freq_hz);
    r.get(c, "cbc.", "b1_start", s.cbc.b1_start);
    r.get(c, "cbc.", "b1_stop", s.cbc.b1_stop);
    r.get(c, "cbc.", "delta_b1", s.cbc.settings.delta_b1);
    r.get(c, "cbc.", "hh_tol_rel", s.cbc.settings.hh_tol_rel);
    r.get(c, "cbc.", "hh_tol_abs", s.cbc.settings.hh_tol_abs);
    r.get(c, "cbc.", "max_fp_iters", s.cbc.settings.max_fp_iters);
    r.get(c, "cbc.", "settle_periods", s.cbc.settings.settle_periods);
    r.get(c, "cbc.", "avg_periods", s.cbc.settings.avg_periods);
    r.get(c, "cbc.", "n_harm", s.cbc.settings.n_harm);
    r.get(c, "cbc.", "steps_per_period", s.cbc.settings.steps_per_period);
    r.get(c, "cbc.", "skip_correction_at_or_above", s.cbc.skip_correction_at_or_above);
    r.get(c, "cbc.", "lenient_at_or_above", s.cbc.lenient_at_or_above);
  }

  if (j.contains("sweeps")) {
    const json& sw = j["sweeps"];
    if (sw.contains("amplitude")) {
      const json& a = sw["amplitude"];
      r.get(a, "sweeps.amplitude.", "freq_hz", s.amplitude_sweep.freq_hz);
      r.get(a, "sweeps.amplitude.", "start", s.amplitude_sweep.start);
      r.get(a, "sweeps.amplitude.", "stop", s.amplitude_sweep.stop);
      r.get(a, "sweeps.amplitude.", "step", s.amplitude_sweep.step);
      sweep_settings_from_json(r, a, "sweeps.amplitude.", s.amplitude_sweep.settings);
    }
    if (sw.contains("linear")) {
      const json& l = sw["linear"];
      r.get(l, "sweeps.linear.", "f_start_hz", s.linear_sweep.f_start_hz);
      r.get(l, "sweeps.linear.", "f_stop_hz", s.linear_sweep.f_stop_hz);
      r.get(l, "sweeps.linear.", "f_step_hz", s.linear_sweep.f_step_hz);
      r.get(l, "sweeps.linear.", "amp", s.linear_sweep.amp);
      sweep_settings_from_json(r, l, "sweeps.linear.", s.linear_sweep.settings);
    }
  }

  if (j.contains("analytic")) {
    const json& a = j["analytic"];
    r.get(a, "analytic.", "x_max", s.analytic.x_max);
    r.get(a, "analytic.", "grid_points", s.analytic.grid_points);
    r.get(a, "analytic.", "fold_x_min", s.analytic.fold_x_min);
    r.get(a, "analytic.", "fold_x_max", s.analytic.fold_x_max);
    r.get(a, "analytic.", "frf_forcing_wn2", s.analytic.frf_forcing_wn2);
    r.get(a, "analytic.", "frf_zeta_min", s.analytic.frf_zeta_min);
    r.get(a, "analytic.", "frf_zeta_max", s.analytic.frf_zeta_max);
    r.get(a, "analytic.", "frf_zeta_points", s.analytic.frf_zeta_points);
  }

  if (j.contains("colloc")) {
    const json& c = j["colloc"];
    r.get(c, "colloc.", "n_harm", s.colloc.n_harm);
    r.get(c, "colloc.", "delta_st_min", s.colloc.delta_st_min);
    r.get(c, "colloc.", "delta_st_max", s.colloc.delta_st_max);
  }

  if (j.contains("identification")) {
    const json& id = j["identification"];
    if (id.contains("init")) {
      const json& init = id["init"];
      r.get(init, "identification.init.", "mu_t", s.identification.init.mu_t);
      r.get(init, "identification.init.", "nu_t", s.identification.init.nu_t);
      r.get(init, "identification.init.", "rho_t", s.identification.init.rho_t);
      r.get(init, "identification.init.", "b_t", s.identification.init.b_t);
      r.get(init, "identification.init.", "c_a", s.identification.init.c_a);
    }
    if (id.contains("bounds")) {
      const json& bd = id["bounds"];
      std::vector<double> lower, upper;
      r.get(bd, "identification.bounds.", "lower", lower);
      r.get(bd, "identification.bounds.", "upper", upper);
      if (lower.size() == 5) std::copy(lower.begin(), lower.end(), s.identification.bounds.lower.begin());
      else if (!lower.empty()) errors.push_back("identification.bounds.lower: need 5 entries");
      if (upper.size() == 5) std::copy(upper.begin(), upper.end(), s.identification.bounds.upper.begin());
      else if (!upper.empty()) errors.push_back("identification.bounds.upper: need 5 entries");
    }
    r.get(id, "identification.", "ftol_rel", s.identification.options.ftol_rel);
    r.get(id, "identification.", "max_evals", s.identification.options.max_evals);
    r.get(id, "identification.", "multi_start", s.identification.options.multi_start);
  }

  r.get(j, "", "seeds", s.seeds);
  r.get(j, "", "out_dir", s.out_dir);

  const std::vector<std::string> semantic = validate_scenario(s);
  errors.insert(errors.end(), semantic.begin(), semantic.end());
  if (!errors.empty()) {
    std::string msg = "invalid scenario '" + path.string() + "':";
    for (const std::string& m : errors) msg += "\n  - " + m;
    throw ValidationError(msg);
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["plant"] = {{"f_n_hz", s.plant.f_n_hz},
                {"tilde", tilde_to_json(s.plant.tilde)},
                {"c_a_true", s.plant.c_a_true},
                {"x_limit", s.plant.x_limit},
                {"shaker_filter",
                 {{"enabled", s.plant.shaker.enabled},
                  {"corner_hz", s.plant.shaker.corner_hz},
                  {"damping", s.plant.shaker.damping}}}};
  j["noise"] = {{"cutoff_hz", s.noise.cutoff_hz},
                {"filter_order", s.noise.filter_order},
                {"sample_rate_hz", s.noise.sample_rate_hz},
                {"sigma1", s.noise.sigma1},
                {"ladder", s.noise.ladder}};
  j["control"] = {{"kp", s.control.kp}, {"kd", s.control.kd}};
  j["cbc"] = {{"freq_hz", s.cbc.freq_hz},
              {"b1_start", s.cbc.b1_start},
              {"b1_stop", s.cbc.b1_stop},
              {"delta_b1", s.cbc.settings.delta_b1},
              {"hh_tol_rel", s.cbc.settings.hh_tol_rel},
              {"hh_tol_abs", s.cbc.settings.hh_tol_abs},
              {"max_fp_iters", s.cbc.settings.max_fp_iters},
              {"settle_periods", s.cbc.settings.settle_periods},
              {"avg_periods", s.cbc.settings.avg_periods},
              {"n_harm", s.cbc.settings.n_harm},
              {"steps_per_period", s.cbc.settings.steps_per_period},
              {"skip_correction_at_or_above", s.cbc.skip_correction_at_or_above},
              {"lenient_at_or_above", s.cbc.lenient_at_or_above}};
  j["sweeps"] = {{"amplitude",
                  {{"freq_hz", s.amplitude_sweep.freq_hz},
                   {"start", s.amplitude_sweep.start},
                   {"stop", s.amplitude_sweep.stop},
                   {"step", s.amplitude_sweep.step},
                   {"settle_periods", s.amplitude_sweep.settings.settle_periods},
                   {"avg_periods", s.amplitude_sweep.settings.avg_periods},
                   {"steps_per_period", s.amplitude_sweep.settings.steps_per_period}}},
                 {"linear",
                  {{"f_start_hz", s.linear_sweep.f_start_hz},
                   {"f_stop_hz", s.linear_sweep.f_stop_hz},
                   {"f_step_hz", s.linear_sweep.f_step_hz},
                   {"amp", s.linear_sweep.amp},
                   {"settle_periods", s.linear_sweep.settings.settle_periods},
                   {"avg_periods", s.linear_sweep.settings.avg_periods},
                   {"steps_per_period", s.linear_sweep.settings.steps_per_period}}}};
  j["analytic"] = {{"x_max", s.analytic.x_max},
                   {"grid_points", s.analytic.grid_points},
                   {"fold_x_min", s.analytic.fold_x_min},
                   {"fold_x_max", s.analytic.fold_x_max},
                   {"frf_forcing_wn2", s.analytic.frf_forcing_wn2},
                   {"frf_zeta_min", s.analytic.frf_zeta_min},
                   {"frf_zeta_max", s.analytic.frf_zeta_max},
                   {"frf_zeta_points", s.analytic.frf_zeta_points}};
  j["colloc"] = {{"n_harm", s.colloc.n_harm},
                 {"delta_st_min", s.colloc.delta_st_min},
                 {"delta_st_max", s.colloc.delta_st_max}};
  j["identification"] = {{"init",
                          {{"mu_t", s.identification.init.mu_t},
                           {"nu_t", s.identification.init.nu_t},
                           {"rho_t", s.identification.init.rho_t},
                           {"b_t", s.identification.init.b_t},
                           {"c_a", s.identification.init.c_a}}},
                         {"bounds",
                          {{"lower", s.identification.bounds.lower},
                           {"upper", s.identification.bounds.upper}}},
                         {"ftol_rel", s.identification.options.ftol_rel},
                         {"max_evals", s.identification.options.max_evals},
                         {"multi_start", s.identification.options.multi_start}};
  j["seeds"] = s.seeds;
  j["out_dir"] = s.out_dir;
  return j.dump();
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = scenario_to_json(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t level_index,
                          const std::string& stream) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(base_seed);
  mix(static_cast<std::uint64_t>(level_index));
  for (unsigned char c : stream) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cbclab
