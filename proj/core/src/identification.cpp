#include "cbclab/identification.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cbclab/analytic.hpp"
#include "cbclab/errors.hpp"
#include "cbclab/powell.hpp"

namespace cbclab {

namespace {

// Relative singular-value thresholds: below `kFlagRatio` a direction is
// reported as poorly identified; below `kDropRatio` it is excluded from the
// inversion instead of being amplified into garbage.
constexpr double kFlagRatio = 1e-6;
constexpr double kDropRatio = 1e-13;

double model_a_base(const DataPoint& d, const ParamVector& p) {
  const TildeParams tp{p.mu_t, p.nu_t, p.rho_t, p.b_t, d.zeta};
  return static_deflection(d.x_amp, tp) / p.c_a;
}

}  // namespace

double objective(const Dataset& dataset, const ParamVector& p) {
  if (p.c_a == 0.0) throw ValidationError("objective: c_a must be nonzero");
  double acc = 0.0;
  for (const DataPoint& d : dataset.points) {
    const double r = d.a_base - model_a_base(d, p);
    acc += r * r;
  }
  return acc;
}

FitResult fit(const Dataset& dataset, const ParamVector& init, const FitBounds& bounds,
              const FitOptions& options) {
  const int m = static_cast<int>(dataset.points.size());
  if (m < 5) throw ValidationError("fit: need at least 5 data points");

  const std::vector<double> lo(bounds.lower.begin(), bounds.lower.end());
  const std::vector<double> hi(bounds.upper.begin(), bounds.upper.end());
  auto f = [&](const std::vector<double>& x) {
    return objective(dataset, ParamVector{x[0], x[1], x[2], x[3], x[4]});
  };

  PowellOptions popts;
  popts.ftol_rel = options.ftol_rel;
  popts.max_evals = options.max_evals;

  std::vector<std::vector<double>> starts;
  const auto base = init.to_array();
  starts.emplace_back(base.begin(), base.end());
  if (options.multi_start) {
    // 8 corners of a lattice over the three shape parameters.
    for (int mask = 0; mask < 8; ++mask) {
      auto s = base;
      for (int j = 0; j < 3; ++j) {
        const double off =
            options.multi_start_spread * std::max(std::abs(base[j]), 0.05);
        s[j] += (mask >> j & 1) ? off : -off;
      }
      starts.emplace_back(s.begin(), s.end());
    }
  }

  FitResult best;
  best.m = m;
  bool first = true;
  int total_evals = 0;
  for (auto& s : starts) {
    PowellResult r = minimize_powell(f, s, lo, hi, popts);
    total_evals += r.evals;
    if (first || r.f < best.residual) {
      best.p_star = ParamVector{r.x[0], r.x[1], r.x[2], r.x[3], r.x[4]};
      best.residual = r.f;
      best.converged = r.converged;
      first = false;
    }
  }
  best.evals = total_evals;

  if (m > 5) {
    const StddevResult sd = asymptotic_stddev(dataset, best.p_star);
    best.estd = sd.estd;
    best.covariance = sd.covariance;
    best.singular_flags = sd.singular_flags;
  }
  return best;
}

namespace {

// Central-difference model gradient w.r.t. the parameters at one data point.
std::array<double, 5> model_gradient(const DataPoint& d, const ParamVector& p) {
  std::array<double, 5> g{};
  auto pa = p.to_array();
  for (int j = 0; j < 5; ++j) {
    const double h = std::max(1e-6 * std::abs(pa[j]), 1e-9);
    auto hiP = pa;
    auto loP = pa;
    hiP[j] += h;
    loP[j] -= h;
    g[j] = (model_a_base(d, ParamVector::from_array(hiP)) -
            model_a_base(d, ParamVector::from_array(loP))) /
           (2.0 * h);
  }
  return g;
}

}  // namespace

StddevResult asymptotic_stddev(const Dataset& dataset, const ParamVector& p_star) {
  const int m = static_cast<int>(dataset.points.size());
  if (m <= 5) throw ValidationError("asymptotic_stddev: need more than 5 data points");

  Eigen::MatrixXd J(m, 5);
  for (int i = 0; i < m; ++i) {
    const auto g = model_gradient(dataset.points[i], p_star);
    for (int j = 0; j < 5; ++j) J(i, j) = g[j];
  }
  const double sigma2 = objective(dataset, p_star) / static_cast<double>(m - 5);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sv_max = sv(0);

  StddevResult out;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(5, 5);
  for (int k = 0; k < 5; ++k) {
    if (sv_max <= 0.0 || sv(k) <= kDropRatio * sv_max) {
      // direction excluded from the inversion; flag its main supporters
      for (int j = 0; j < 5; ++j) {
        if (std::abs(svd.matrixV()(j, k)) > 0.3) out.singular_flags[j] = true;
      }
      continue;
    }
    if (sv(k) <= kFlagRatio * sv_max) {
      for (int j = 0; j < 5; ++j) {
        if (std::abs(svd.matrixV()(j, k)) > 0.3) out.singular_flags[j] = true;
      }
    }
    const Eigen::VectorXd v = svd.matrixV().col(k);
    cov += (sigma2 / (sv(k) * sv(k))) * v * v.transpose();
  }

  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) out.covariance[i][j] = cov(i, j);
    out.estd[i] = std::sqrt(std::max(cov(i, i), 0.0));
  }
  return out;
}

std::vector<std::pair<double, double>> confidence_band(const FitResult& fit_result,
                                                       double zeta,
                                                       std::span<const double> x_grid,
                                                       double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("confidence_band: level must lie in (0, 1)");
  }
  const double z = normal_quantile(0.5 + 0.5 * level);

  std::vector<std::pair<double, double>> band;
  band.reserve(x_grid.size());
  for (double x : x_grid) {
    DataPoint d{0.0, zeta, x};
    const double value = model_a_base(d, fit_result.p_star);
    const auto g = model_gradient(d, fit_result.p_star);
    double var = 0.0;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) var += g[i] * fit_result.covariance[i][j] * g[j];
    }
    const double half = z * std::sqrt(std::max(var, 0.0));
    band.emplace_back(value - half, value + half);
  }
  return band;
}

DuffingParams recover_dimensional(const ParamVector& p_tilde, double omega_n) {
  if (!(omega_n > 0.0)) throw ValidationError("recover_dimensional: omega_n must be positive");
  return DuffingParams::from_tilde(
      omega_n, DuffingParams::Tilde{p_tilde.mu_t, p_tilde.nu_t, p_tilde.rho_t, p_tilde.b_t});
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation, |relative error| < 1.2e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return x;
}

}  // namespace cbclab
