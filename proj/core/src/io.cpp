#include "cbclab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw NumericsError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open for reading: " + path.string());
  return in;
}

json coeffs_to_json(const HarmonicCoeffs& c) {
  return json{{"omega", c.omega}, {"n_harm", c.n_harm}, {"a0", c.a0}, {"a", c.a}, {"b", c.b}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_simulation_csv(const std::filesystem::path& path, const SimulationRecord& rec) {
  auto out = open_out(path);
  out << "t,x,forcing,base_accel,noise\n";
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    out << format_g17(rec.times[i]) << ',' << format_g17(rec.x[i]) << ','
        << format_g17(rec.forcing[i]) << ',' << format_g17(rec.base_accel[i]) << ','
        << format_g17(rec.noise[i]) << '\n';
  }
}

void write_branch_csv(const std::filesystem::path& path, const Branch& branch) {
  auto out = open_out(path);
  out << "b1_target,phi,base_accel_amp,x_amp,theta,hh_residual,fp_iters,accepted\n";
  for (const BranchPoint& p : branch.points) {
    out << format_g17(p.b1_target) << ',' << format_g17(p.phi) << ','
        << format_g17(p.base_accel_amp) << ',' << format_g17(p.x_amp) << ','
        << format_g17(p.theta) << ',' << format_g17(p.hh_residual) << ',' << p.fp_iters_used
        << ',' << (p.accepted ? 1 : 0) << '\n';
  }
}

void write_branch_sidecar_json(const std::filesystem::path& path, const Branch& branch) {
  json j;
  j["truncated"] = branch.truncated;
  j["diagnostic"] = branch.diagnostic;
  j["points"] = json::array();
  for (const BranchPoint& p : branch.points) {
    j["points"].push_back(json{{"b1_target", p.b1_target},
                               {"phi", p.phi},
                               {"base_accel_amp", p.base_accel_amp},
                               {"x_amp", p.x_amp},
                               {"theta", p.theta},
                               {"hh_residual", p.hh_residual},
                               {"fp_iters", p.fp_iters_used},
                               {"accepted", p.accepted},
                               {"response", coeffs_to_json(p.response)},
                               {"forcing", coeffs_to_json(p.forcing)},
                               {"target", coeffs_to_json(p.target.coeffs)}});
  }
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Branch read_branch_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty branch csv: " + path.string());
  Branch branch;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw ValidationError("malformed branch csv row: " + line);
    BranchPoint p;
    p.b1_target = std::stod(cells[0]);
    p.phi = std::stod(cells[1]);
    p.base_accel_amp = std::stod(cells[2]);
    p.x_amp = std::stod(cells[3]);
    p.theta = std::stod(cells[4]);
    p.hh_residual = std::stod(cells[5]);
    p.fp_iters_used = std::stoi(cells[6]);
    p.accepted = cells[7] == "1";
    branch.points.push_back(std::move(p));
  }
  return branch;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& pts) {
  auto out = open_out(path);
  out << "freq_hz,forcing_amp,base_accel_amp,x_amp,theta,jumped\n";
  for (const SweepPoint& p : pts) {
    out << format_g17(p.freq_hz) << ',' << format_g17(p.forcing_amp) << ','
        << format_g17(p.base_accel_amp) << ',' << format_g17(p.x_amp) << ','
        << format_g17(p.theta) << ',' << (p.jumped ? 1 : 0) << '\n';
  }
}

std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty sweep csv: " + path.string());
  std::vector<SweepPoint> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 6) throw ValidationError("malformed sweep csv row: " + line);
    SweepPoint p;
    p.freq_hz = std::stod(cells[0]);
    p.forcing_amp = std::stod(cells[1]);
    p.base_accel_amp = std::stod(cells[2]);
    p.x_amp = std::stod(cells[3]);
    p.theta = std::stod(cells[4]);
    p.jumped = cells[5] == "1";
    pts.push_back(p);
  }
  return pts;
}

void write_scurve_csv(const std::filesystem::path& path,
                      const std::vector<ResponsePoint>& pts) {
  auto out = open_out(path);
  out << "x_amp,delta_st,theta,stable_hint\n";
  for (const ResponsePoint& p : pts) {
    out << format_g17(p.x_amp) << ',' << format_g17(p.delta_st) << ',' << format_g17(p.theta)
        << ',' << (p.stable_hint ? 1 : 0) << '\n';
  }
}

void write_frf_csv(const std::filesystem::path& path,
                   const std::vector<FrequencyResponseSlice>& slices) {
  auto out = open_out(path);
  out << "zeta,x_amp,branch_index\n";
  for (const FrequencyResponseSlice& s : slices) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << format_g17(s.zeta) << ',' << format_g17(s.x[i]) << ',' << i << '\n';
    }
  }
}

void write_colloc_csv(const std::filesystem::path& path,
                      const std::vector<PeriodicSolution>& branch) {
  auto out = open_out(path);
  out << "delta_st,omega,x_amp,theta,stable,mult1_mod,mult2_mod\n";
  for (const PeriodicSolution& s : branch) {
    out << format_g17(s.delta_st) << ',' << format_g17(s.omega) << ',' << format_g17(s.x_amp)
        << ',' << format_g17(s.theta) << ',' << (s.stable ? 1 : 0) << ','
        << format_g17(s.multiplier_mod[0]) << ',' << format_g17(s.multiplier_mod[1]) << '\n';
  }
}

void write_fit_json(const std::filesystem::path& path, const FitResult& fit) {
  json j;
  j["params"] = {{"mu_t", fit.p_star.mu_t},
                 {"nu_t", fit.p_star.nu_t},
                 {"rho_t", fit.p_star.rho_t},
                 {"b_t", fit.p_star.b_t},
                 {"c_a", fit.p_star.c_a}};
  j["estd"] = {{"mu_t", fit.estd[0]},
               {"nu_t", fit.estd[1]},
               {"rho_t", fit.estd[2]},
               {"b_t", fit.estd[3]},
               {"c_a", fit.estd[4]}};
  j["residual"] = fit.residual;
  j["m"] = fit.m;
  j["converged"] = fit.converged;
  j["singular_flags"] = fit.singular_flags;
  json cov = json::array();
  for (const auto& row : fit.covariance) cov.push_back(row);
  j["covariance"] = cov;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

FitResult read_fit_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  json j;
  in >> j;
  FitResult fit;
  fit.p_star.mu_t = j.at("params").at("mu_t").get<double>();
  fit.p_star.nu_t = j.at("params").at("nu_t").get<double>();
  fit.p_star.rho_t = j.at("params").at("rho_t").get<double>();
  fit.p_star.b_t = j.at("params").at("b_t").get<double>();
  fit.p_star.c_a = j.at("params").at("c_a").get<double>();
  fit.estd[0] = j.at("estd").at("mu_t").get<double>();
  fit.estd[1] = j.at("estd").at("nu_t").get<double>();
  fit.estd[2] = j.at("estd").at("rho_t").get<double>();
  fit.estd[3] = j.at("estd").at("b_t").get<double>();
  fit.estd[4] = j.at("estd").at("c_a").get<double>();
  fit.residual = j.at("residual").get<double>();
  fit.m = j.at("m").get<int>();
  fit.converged = j.at("converged").get<bool>();
  const auto& flags = j.at("singular_flags");
  for (int i = 0; i < 5; ++i) fit.singular_flags[i] = flags.at(i).get<bool>();
  if (j.contains("covariance")) {
    for (int i = 0; i < 5; ++i) {
      for (int k = 0; k < 5; ++k) fit.covariance[i][k] = j["covariance"][i][k].get<double>();
    }
  }
  return fit;
}

std::string harmonic_coeffs_csv_row(const HarmonicCoeffs& c) {
  std::string row = format_g17(c.omega) + "," + std::to_string(c.n_harm) + "," + format_g17(c.a0);
  for (int k = 0; k < c.n_harm; ++k) row += "," + format_g17(c.a[k]);
  for (int k = 0; k < c.n_harm; ++k) row += "," + format_g17(c.b[k]);
  return row;
}

}  // namespace cbclab
