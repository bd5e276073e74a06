#include "cbclab/powell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - golden ratio

struct LineProblem {
  const std::function<double(const std::vector<double>&)>& f;
  const std::vector<double>& origin;
  const std::vector<double>& dir;
  std::vector<double> scratch;
  int* evals;
  int max_evals;

  double operator()(double t) {
    const std::size_t n = origin.size();
    for (std::size_t i = 0; i < n; ++i) scratch[i] = origin[i] + t * dir[i];
    ++(*evals);
    return f(scratch);
  }
};

// Feasible parameter interval of origin + t*dir inside [lower, upper].
std::pair<double, double> feasible_interval(const std::vector<double>& origin,
                                            const std::vector<double>& dir,
                                            const std::vector<double>& lo,
                                            const std::vector<double>& hi) {
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < origin.size(); ++i) {
    if (dir[i] == 0.0) continue;
    const double a = (lo[i] - origin[i]) / dir[i];
    const double b = (hi[i] - origin[i]) / dir[i];
    t_lo = std::max(t_lo, std::min(a, b));
    t_hi = std::min(t_hi, std::max(a, b));
  }
  if (!std::isfinite(t_lo)) t_lo = -1e30;
  if (!std::isfinite(t_hi)) t_hi = 1e30;
  return {t_lo, t_hi};
}

// Golden-section/parabolic line minimization on [a, b] starting from t = 0.
// Returns (t_min, f_min).
std::pair<double, double> brent_line(LineProblem& lp, double a, double b, double t0,
                                     double f0, double tol) {
  // Bracket a minimum around t0 by stepping geometrically inside [a, b].
  double step = tol * 64.0;
  double t1 = std::clamp(t0 + step, a, b);
  double f1 = lp(t1);
  if (f1 > f0) {
    step = -step;
    t1 = std::clamp(t0 + step, a, b);
    f1 = lp(t1);
    if (f1 > f0) {
      // Neither side improves at the smallest scale; nothing to do.
      return {t0, f0};
    }
  }
  double t2 = t1, f2 = f1;
  while (true) {
    step *= 1.8;
    const double t_next = std::clamp(t2 + step, a, b);
    if (t_next == t2) break;
    const double f_next = lp(t_next);
    if (f_next >= f2) {
      // minimum bracketed between t0-side and t_next
      a = std::min(t0, t_next);
      b = std::max(t0, t_next);
      break;
    }
    t1 = t2;
    f1 = f2;
    t2 = t_next;
    f2 = f_next;
    if (t_next == a || t_next == b) break;  // hit a bound while descending
  }

  // Brent's method on [a, b] seeded with the best point so far.
  double x = f2 <= f1 ? t2 : t1;
  double fx = std::min(f1, f2);
  double w = x, v = x, fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = tol * (std::abs(x) + 1.0) * 0.1;
    if (std::abs(x - m) + 0.5 * (b - a) <= 2.0 * tol1) break;
    bool use_golden = true;
    if (std::abs(e) > tol1) {
      // parabolic fit through x, v, w
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      if (std::abs(p) < std::abs(0.5 * q * e) && p > q * (a - x) && p < q * (b - x)) {
        e = d;
        d = p / q;
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x < m) ? b - x : a - x;
      d = kGolden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = lp(u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
    if (*lp.evals >= lp.max_evals) break;
  }
  if (fx < f0) return {x, fx};
  return {t0, f0};
}

}  // namespace

PowellResult minimize_powell(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, const PowellOptions& opts) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw ValidationError("minimize_powell: bound dimensions mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw ValidationError("minimize_powell: empty bound box");
    x0[i] = std::clamp(x0[i], lower[i], upper[i]);
  }

  std::vector<double> scale = opts.step_scale;
  if (scale.empty()) {
    scale.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      scale[i] = std::max(0.1 * std::abs(x0[i]), 1e-3 * (upper[i] - lower[i]));
      if (!(scale[i] > 0.0)) scale[i] = 1e-3;
    }
  }

  // Direction set: scaled coordinate axes.
  std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) dirs[i][i] = scale[i];

  PowellResult res;
  res.x = x0;
  res.evals = 1;
  res.f = f(res.x);

  std::vector<double> x_start = res.x;
  double f_start = res.f;

  for (int iter = 0; iter < 1000; ++iter) {
    double biggest_drop = 0.0;
    std::size_t biggest_idx = 0;

    for (std::size_t d = 0; d < n; ++d) {
      const double f_before = res.f;
      LineProblem lp{f, res.x, dirs[d], std::vector<double>(n), &res.evals, opts.max_evals};
      const auto [t_lo, t_hi] = feasible_interval(res.x, dirs[d], lower, upper);
      const auto [t_min, f_min] = brent_line(lp, t_lo, t_hi, 0.0, res.f, 1e-10);
      if (f_min < res.f) {
        for (std::size_t i = 0; i < n; ++i) res.x[i] += t_min * dirs[d][i];
        res.f = f_min;
      }
      if (f_before - res.f > biggest_drop) {
        biggest_drop = f_before - res.f;
        biggest_idx = d;
      }
      if (res.evals >= opts.max_evals) return res;
    }

    const double drop = f_start - res.f;
    if (2.0 * drop <= opts.ftol_rel * (std::abs(f_start) + std::abs(res.f)) + 1e-300) {
      res.converged = true;
      return res;
    }

    // Powell direction update: try the extrapolated overall displacement and,
    // when productive, replace the direction of largest decrease with it.
    std::vector<double> disp(n);
    std::vector<double> x_ext(n);
    for (std::size_t i = 0; i < n; ++i) {
      disp[i] = res.x[i] - x_start[i];
      x_ext[i] = std::clamp(res.x[i] + disp[i], lower[i], upper[i]);
    }
    ++res.evals;
    const double f_ext = f(x_ext);
    if (f_ext < f_start) {
      const double t = 2.0 * (f_start - 2.0 * res.f + f_ext) *
                           (f_start - res.f - biggest_drop) * (f_start - res.f - biggest_drop) -
                       biggest_drop * (f_start - f_ext) * (f_start - f_ext);
      if (t < 0.0) {
        LineProblem lp{f, res.x, disp, std::vector<double>(n), &res.evals, opts.max_evals};
        const auto [t_lo, t_hi] = feasible_interval(res.x, disp, lower, upper);
        const auto [t_min, f_min] = brent_line(lp, t_lo, t_hi, 0.0, res.f, 1e-10);
        if (f_min < res.f) {
          for (std::size_t i = 0; i < n; ++i) res.x[i] += t_min * disp[i];
          res.f = f_min;
        }
        dirs[biggest_idx] = disp;
      }
    }

    x_start = res.x;
    f_start = res.f;
    if (res.evals >= opts.max_evals) return res;
  }
  return res;
}

}  // namespace cbclab
