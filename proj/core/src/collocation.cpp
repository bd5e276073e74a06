#include "cbclab/collocation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Quadrature grid and trig tables for Galerkin projection: products up to
// x^7 of an M-harmonic series reach 8M once multiplied by a basis function,
// so the rectangle rule needs more than 8M points to stay alias-free.
struct HbGrid {
  int n_harm;
  int n_q;
  std::vector<double> cos_t;  // [k-1][i] for k = 1..M, size M*n_q
  std::vector<double> sin_t;

  explicit HbGrid(int M) : n_harm(M), n_q(std::max(256, 8 * M + 8)) {
    cos_t.resize(static_cast<std::size_t>(M) * n_q);
    sin_t.resize(static_cast<std::size_t>(M) * n_q);
    for (int k = 1; k <= M; ++k) {
      for (int i = 0; i < n_q; ++i) {
        const double ang = kTwoPi * static_cast<double>(k) * i / n_q;
        cos_t[static_cast<std::size_t>(k - 1) * n_q + i] = std::cos(ang);
        sin_t[static_cast<std::size_t>(k - 1) * n_q + i] = std::sin(ang);
      }
    }
  }

  double c(int k, int i) const { return cos_t[static_cast<std::size_t>(k - 1) * n_q + i]; }
  double s(int k, int i) const { return sin_t[static_cast<std::size_t>(k - 1) * n_q + i]; }
};

// Coefficient vector layout: [a0, a1..aM, b1..bM].
Eigen::VectorXd pack(const HarmonicCoeffs& c, int M) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * M + 1);
  u(0) = c.a0;
  const int copy = std::min(M, c.n_harm);
  for (int k = 1; k <= copy; ++k) {
    u(k) = c.a[k - 1];
    u(M + k) = c.b[k - 1];
  }
  return u;
}

HarmonicCoeffs unpack(const Eigen::VectorXd& u, double omega, int M) {
  HarmonicCoeffs c = HarmonicCoeffs::zero(omega, M);
  c.a0 = u(0);
  for (int k = 1; k <= M; ++k) {
    c.a[k - 1] = u(k);
    c.b[k - 1] = u(M + k);
  }
  return c;
}

// Samples of the series and its first/second derivatives on the grid.
void evaluate_orbit(const HbGrid& g, const Eigen::VectorXd& u, double omega,
                    std::vector<double>& x, std::vector<double>& xd, std::vector<double>& xdd) {
  const int M = g.n_harm;
  x.assign(g.n_q, 0.5 * u(0));
  xd.assign(g.n_q, 0.0);
  xdd.assign(g.n_q, 0.0);
  for (int k = 1; k <= M; ++k) {
    const double kw = k * omega;
    const double ak = u(k);
    const double bk = u(M + k);
    for (int i = 0; i < g.n_q; ++i) {
      const double ck = g.c(k, i);
      const double sk = g.s(k, i);
      x[i] += ak * ck + bk * sk;
      xd[i] += kw * (bk * ck - ak * sk);
      xdd[i] -= kw * kw * (ak * ck + bk * sk);
    }
  }
}

// Galerkin projection of a grid function onto [1/2, cos k, sin k] rows with
// the same 2/n scaling as the signal-module coefficients.
Eigen::VectorXd project_rows(const HbGrid& g, const std::vector<double>& r) {
  const int M = g.n_harm;
  Eigen::VectorXd R(2 * M + 1);
  double mean = 0.0;
  for (int i = 0; i < g.n_q; ++i) mean += r[i];
  R(0) = 2.0 * mean / g.n_q;
  for (int k = 1; k <= M; ++k) {
    double ca = 0.0, sa = 0.0;
    for (int i = 0; i < g.n_q; ++i) {
      ca += r[i] * g.c(k, i);
      sa += r[i] * g.s(k, i);
    }
    R(k) = 2.0 * ca / g.n_q;
    R(M + k) = 2.0 * sa / g.n_q;
  }
  return R;
}

Eigen::VectorXd hb_residual(const HbGrid& g, const DuffingParams& p, double delta_st,
                            double omega, const Eigen::VectorXd& u) {
  std::vector<double> x, xd, xdd;
  evaluate_orbit(g, u, omega, x, xd, xdd);
  const double f0 = delta_st * p.omega_n * p.omega_n;
  std::vector<double> r(g.n_q);
  for (int i = 0; i < g.n_q; ++i) {
    r[i] = xdd[i] + p.b * xd[i] + p.restoring(x[i]) - f0 * g.c(1, i);
  }
  return project_rows(g, r);
}

Eigen::MatrixXd hb_jacobian(const HbGrid& g, const DuffingParams& p, double omega,
                            const Eigen::VectorXd& u) {
  const int M = g.n_harm;
  const int n = 2 * M + 1;
  std::vector<double> x, xd, xdd;
  evaluate_orbit(g, u, omega, x, xd, xdd);
  std::vector<double> gp(g.n_q);
  for (int i = 0; i < g.n_q; ++i) gp[i] = p.restoring_derivative(x[i]);

  Eigen::MatrixXd J(n, n);
  std::vector<double> col(g.n_q);
  for (int j = 0; j < n; ++j) {
    if (j == 0) {
      for (int i = 0; i < g.n_q; ++i) col[i] = 0.5 * gp[i];
    } else if (j <= M) {
      const int k = j;
      const double kw = k * omega;
      for (int i = 0; i < g.n_q; ++i) {
        col[i] = -kw * kw * g.c(k, i) - p.b * kw * g.s(k, i) + gp[i] * g.c(k, i);
      }
    } else {
      const int k = j - M;
      const double kw = k * omega;
      for (int i = 0; i < g.n_q; ++i) {
        col[i] = -kw * kw * g.s(k, i) + p.b * kw * g.c(k, i) + gp[i] * g.s(k, i);
      }
    }
    J.col(j) = project_rows(g, col);
  }
  return J;
}

double residual_scale(const DuffingParams& p, double delta_st, const Eigen::VectorXd& u) {
  return p.omega_n * p.omega_n * std::max({std::abs(delta_st), u.cwiseAbs().maxCoeff(), 1e-9});
}

PeriodicSolution finalize(const HbGrid& g, const DuffingParams& p, double delta_st,
                          double omega, const Eigen::VectorXd& u, double res_norm,
                          const CollocOptions& opts) {
  PeriodicSolution sol;
  sol.coeffs = unpack(u, omega, g.n_harm);
  sol.omega = omega;
  sol.delta_st = delta_st;
  sol.residual_norm = res_norm;
  sol.x_amp = std::hypot(u(1), u(g.n_harm + 1));
  sol.theta = (sol.x_amp > 0.0) ? std::atan2(-u(g.n_harm + 1), u(1)) : 0.0;
  auto [mods, stable] = floquet_stability(sol, p, opts.floquet_steps);
  sol.multiplier_mod = mods;
  sol.stable = stable;
  return sol;
}

}  // namespace

HarmonicCoeffs fundamental_guess(double x_amp, double theta, double omega, int n_harm) {
  HarmonicCoeffs c = HarmonicCoeffs::zero(omega, n_harm);
  c.a[0] = x_amp * std::cos(theta);
  c.b[0] = -x_amp * std::sin(theta);
  return c;
}

PeriodicSolution solve_periodic(const DuffingParams& params, double delta_st, double omega,
                                const HarmonicCoeffs& guess, const CollocOptions& opts) {
  params.validate();
  if (!(omega > 0.0)) throw ValidationError("solve_periodic: omega must be positive");
  if (opts.n_harm < 1) throw ValidationError("solve_periodic: n_harm must be >= 1");

  const HbGrid grid(opts.n_harm);
  Eigen::VectorXd u = pack(guess, opts.n_harm);

  Eigen::VectorXd R = hb_residual(grid, params, delta_st, omega, u);
  double rnorm = R.norm();
  for (int it = 0; it < opts.max_newton; ++it) {
    const double scale = residual_scale(params, delta_st, u);
    if (rnorm <= opts.newton_tol * scale) {
      return finalize(grid, params, delta_st, omega, u, rnorm, opts);
    }
    const Eigen::MatrixXd J = hb_jacobian(grid, params, omega, u);
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-R);

    // Damped update: halve until the residual actually shrinks.
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h < 10; ++h) {
      const Eigen::VectorXd u_try = u + lambda * step;
      const Eigen::VectorXd R_try = hb_residual(grid, params, delta_st, omega, u_try);
      if (R_try.norm() < rnorm) {
        u = u_try;
        R = R_try;
        rnorm = R_try.norm();
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  {
    const double scale = residual_scale(params, delta_st, u);
    if (rnorm <= opts.newton_tol * scale) {
      return finalize(grid, params, delta_st, omega, u, rnorm, opts);
    }
  }
  throw NumericsError("solve_periodic: Newton failed to converge, last residual " +
                      std::to_string(rnorm));
}

std::pair<std::array<double, 2>, bool> floquet_stability(const PeriodicSolution& solution,
                                                         const DuffingParams& params,
                                                         int steps_per_period) {
  if (steps_per_period < 500) steps_per_period = 500;
  const double T = kTwoPi / solution.omega;
  const double dt = T / steps_per_period;

  // Integrate the 2x2 variational system d/dt [xi, eta] =
  // [eta, -b eta - g'(x(t)) xi] for both unit initial conditions at once.
  double m[4] = {1.0, 0.0, 0.0, 1.0};  // columns: (xi, eta) pairs
  auto gprime = [&](double t) { return params.restoring_derivative(solution.coeffs.value_at(t)); };

  for (int i = 0; i < steps_per_period; ++i) {
    const double t = i * dt;
    const double g0 = gprime(t);
    const double gh = gprime(t + 0.5 * dt);
    const double g1 = gprime(t + dt);
    for (int col = 0; col < 2; ++col) {
      double xi = m[col];
      double eta = m[2 + col];
      const double k1x = eta, k1v = -params.b * eta - g0 * xi;
      const double x2 = xi + 0.5 * dt * k1x, v2 = eta + 0.5 * dt * k1v;
      const double k2x = v2, k2v = -params.b * v2 - gh * x2;
      const double x3 = xi + 0.5 * dt * k2x, v3 = eta + 0.5 * dt * k2v;
      const double k3x = v3, k3v = -params.b * v3 - gh * x3;
      const double x4 = xi + dt * k3x, v4 = eta + dt * k3v;
      const double k4x = v4, k4v = -params.b * v4 - g1 * x4;
      m[col] = xi + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      m[2 + col] = eta + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
  }

  if (!std::isfinite(m[0]) || !std::isfinite(m[1]) || !std::isfinite(m[2]) ||
      !std::isfinite(m[3])) {
    throw NumericsError("floquet_stability: non-finite monodromy matrix");
  }

  const double tr = m[0] + m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const double disc = tr * tr - 4.0 * det;
  std::array<double, 2> mods;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    mods = {std::abs(0.5 * (tr + sq)), std::abs(0.5 * (tr - sq))};
  } else {
    const double mod = std::sqrt(std::max(det, 0.0));
    mods = {mod, mod};
  }
  if (mods[0] < mods[1]) std::swap(mods[0], mods[1]);
  const bool stable = mods[0] < 1.0 - 1e-6;
  return {mods, stable};
}

std::vector<PeriodicSolution> continue_branch(const DuffingParams& params, FreeParam free_param,
                                              std::pair<double, double> range,
                                              const PeriodicSolution& seed,
                                              const ContinuationOptions& opts) {
  params.validate();
  const int M = opts.colloc.n_harm;
  const HbGrid grid(M);
  const int n = 2 * M + 1;

  const double lam_scale =
      free_param == FreeParam::omega ? params.omega_n : std::max(std::abs(range.second), 1e-3);
  const double lam_lo = std::min(range.first, range.second);
  const double lam_hi = std::max(range.first, range.second);

  auto lambda_of = [&](const PeriodicSolution& s) {
    return free_param == FreeParam::delta_st ? s.delta_st : s.omega;
  };
  auto residual_at = [&](const Eigen::VectorXd& u, double lam) {
    const double d = free_param == FreeParam::delta_st ? lam : seed.delta_st;
    const double w = free_param == FreeParam::omega ? lam : seed.omega;
    return hb_residual(grid, params, d, w, u);
  };

  std::vector<PeriodicSolution> branch;
  branch.push_back(seed);

  // Normalized tangent in (u, lam/lam_scale) space; the first step moves
  // along the parameter axis toward the far end of the range.
  Eigen::VectorXd tangent = Eigen::VectorXd::Zero(n + 1);
  tangent(n) = (range.second >= range.first) ? 1.0 : -1.0;

  Eigen::VectorXd u_prev = pack(seed.coeffs, M);
  double lam_prev = lambda_of(seed);
  double ds = opts.ds0;

  while (static_cast<int>(branch.size()) < opts.max_points) {
    // Predictor.
    Eigen::VectorXd u = u_prev + ds * tangent.head(n);
    double lam = lam_prev + ds * tangent(n) * lam_scale;

    // Corrector on the bordered system.
    bool converged = false;
    int iters_used = 0;
    for (int it = 0; it < opts.colloc.max_newton; ++it) {
      const double d = free_param == FreeParam::delta_st ? lam : seed.delta_st;
      const double w = free_param == FreeParam::omega ? lam : seed.omega;
      Eigen::VectorXd R = residual_at(u, lam);
      const double arc = (u - u_prev).dot(tangent.head(n)) +
                         (lam - lam_prev) / lam_scale * tangent(n) - ds;
      const double scale = residual_scale(params, d, u);
      if (R.norm() <= opts.colloc.newton_tol * scale && std::abs(arc) <= 1e-12 + 1e-10 * ds) {
        converged = true;
        iters_used = it;
        break;
      }

      Eigen::MatrixXd A(n + 1, n + 1);
      A.topLeftCorner(n, n) = hb_jacobian(grid, params, w, u);
      // dR/dlambda by central differences (covers both parameter choices).
      const double h = 1e-6 * std::max(std::abs(lam), 1e-6);
      A.topRightCorner(n, 1) = (residual_at(u, lam + h) - residual_at(u, lam - h)) / (2.0 * h);
      A.bottomLeftCorner(1, n) = tangent.head(n).transpose();
      A(n, n) = tangent(n) / lam_scale;

      Eigen::VectorXd rhs(n + 1);
      rhs.head(n) = -R;
      rhs(n) = -arc;
      const Eigen::VectorXd step = A.colPivHouseholderQr().solve(rhs);
      if (!step.allFinite()) break;
      u += step.head(n);
      lam += step(n);
    }

    if (!converged) {
      ds *= opts.shrink;
      if (ds < opts.ds_min) break;  // step underflow: truncate the branch
      continue;
    }

    const double d = free_param == FreeParam::delta_st ? lam : seed.delta_st;
    const double w = free_param == FreeParam::omega ? lam : seed.omega;
    const Eigen::VectorXd R = residual_at(u, lam);
    branch.push_back(finalize(grid, params, d, w, u, R.norm(), opts.colloc));

    // Secant tangent for the next step.
    Eigen::VectorXd t_new(n + 1);
    t_new.head(n) = u - u_prev;
    t_new(n) = (lam - lam_prev) / lam_scale;
    const double norm = t_new.norm();
    if (norm > 0.0) tangent = t_new / norm;

    u_prev = u;
    lam_prev = lam;

    if (lam < lam_lo || lam > lam_hi) break;
    if (iters_used <= 4) ds = std::min(ds * opts.grow, opts.ds_max);
  }
  return branch;
}

}  // namespace cbclab
