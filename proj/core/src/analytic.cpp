#include "cbclab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {

// In-phase forcing component: delta_st*cos(theta). The quadrature component
// is delta_st*sin(theta) = -b_t*zeta*X.
double in_phase(double x, const TildeParams& p) {
  const double x2 = x * x;
  const double x3 = x2 * x;
  return x3 * (0.75 * p.mu_t + x2 * (0.625 * p.nu_t + x2 * (35.0 / 64.0) * p.rho_t)) -
         x * (p.zeta * p.zeta - 1.0);
}

double quad_phase(double x, const TildeParams& p) { return -p.b_t * p.zeta * x; }

}  // namespace

double phase_angle(double x_amp, const TildeParams& p) {
  if (x_amp == 0.0) return 0.0;
  return std::atan2(quad_phase(x_amp, p), in_phase(x_amp, p));
}

double static_deflection(double x_amp, const TildeParams& p) {
  // |C/cos(theta)| and |S/sin(theta)| coincide with the vector norm of the
  // two forcing components, which has no singularity at cos(theta) = 0.
  return std::hypot(in_phase(x_amp, p), quad_phase(x_amp, p));
}

std::vector<ResponsePoint> s_curve(const TildeParams& p, std::span<const double> x_grid) {
  const std::size_t n = x_grid.size();
  std::vector<ResponsePoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].x_amp = x_grid[i];
    out[i].delta_st = static_deflection(x_grid[i], p);
    out[i].theta = phase_angle(x_grid[i], p);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    const double dx = out[hi].x_amp - out[lo].x_amp;
    const double slope = dx != 0.0 ? (out[hi].delta_st - out[lo].delta_st) / dx : 0.0;
    out[i].stable_hint = slope > 0.0;
  }
  return out;
}

std::vector<double> default_x_grid(double x_max, int n) {
  if (!(x_max > 0.0) || n < 2) throw ValidationError("default_x_grid: bad arguments");
  std::vector<double> grid(static_cast<std::size_t>(n));
  // Geometric spacing over six decades keeps resolution near zero.
  const double x_min = x_max * 1e-6;
  const double ratio = std::log(x_max / x_min);
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] =
        x_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return grid;
}

namespace {

// Bisection for f(x) = 0 on a bracket with sign change, to given relative x tolerance.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo, double rel_tol) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(mid), 1e-300)) return mid;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_lo < 0.0) != (f_mid < 0.0)) {
      hi = mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> amplitude_roots(const TildeParams& p, double delta_st, double x_max) {
  if (!(delta_st > 0.0)) throw ValidationError("amplitude_roots: delta_st must be positive");
  if (!(x_max > 0.0)) throw ValidationError("amplitude_roots: x_max must be positive");

  const std::vector<double> grid = default_x_grid(x_max);
  auto g = [&](double x) { return static_deflection(x, p) - delta_st; };

  std::vector<double> roots;
  double g_prev = g(grid.front());
  if (g_prev == 0.0) roots.push_back(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double g_here = g(grid[i]);
    if (g_here == 0.0) {
      roots.push_back(grid[i]);
    } else if ((g_prev < 0.0) != (g_here < 0.0)) {
      roots.push_back(bisect(g, grid[i - 1], grid[i], g_prev, 1e-10));
    }
    g_prev = g_here;
  }
  return roots;
}

std::vector<FrequencyResponseSlice> frequency_response(const TildeParams& p_without_zeta,
                                                       double delta_st,
                                                       std::span<const double> zeta_grid,
                                                       double x_max) {
  if (delta_st < 0.0) throw ValidationError("frequency_response: delta_st must be >= 0");
  std::vector<FrequencyResponseSlice> out;
  out.reserve(zeta_grid.size());

  for (double zeta : zeta_grid) {
    TildeParams p = p_without_zeta;
    p.zeta = zeta;
    FrequencyResponseSlice slice;
    slice.zeta = zeta;
    // Zero forcing has the single rest solution.
    slice.x = delta_st == 0.0 ? std::vector<double>{0.0}
                              : amplitude_roots(p, delta_st, x_max);
    if (slice.x.size() > 3) {
      throw NumericsError("frequency_response: " + std::to_string(slice.x.size()) +
                          " amplitude roots at zeta = " + std::to_string(zeta) +
                          "; model is not S-shaped over this amplitude range");
    }
    out.push_back(std::move(slice));
  }
  return out;
}

std::vector<Fold> find_folds(const TildeParams& p, double x_min, double x_max,
                             int grid_points) {
  if (!(x_min > 0.0) || !(x_max > x_min)) throw ValidationError("find_folds: bad range");
  if (grid_points < 8) throw ValidationError("find_folds: grid too coarse");

  auto slope = [&](double x) {
    const double h = 1e-6 * std::max(x, 1e-3 * x_max);
    return (static_deflection(x + h, p) - static_deflection(x - h, p)) / (2.0 * h);
  };

  std::vector<Fold> folds;
  const double dx = (x_max - x_min) / static_cast<double>(grid_points - 1);
  double x_prev = x_min;
  double s_prev = slope(x_prev);
  for (int i = 1; i < grid_points; ++i) {
    const double x_here = x_min + i * dx;
    const double s_here = slope(x_here);
    if (s_here == 0.0 || (s_prev < 0.0) != (s_here < 0.0)) {
      const double xf = bisect(slope, x_prev, x_here, s_prev, 1e-12);
      folds.push_back({xf, static_deflection(xf, p)});
    }
    x_prev = x_here;
    s_prev = s_here;
  }
  if (folds.size() % 2 != 0) {
    throw NumericsError("find_folds: odd fold count (" + std::to_string(folds.size()) +
                        "); widen the range or refine the grid");
  }
  std::sort(folds.begin(), folds.end(),
            [](const Fold& a, const Fold& b) { return a.x_amp < b.x_amp; });
  return folds;
}

}  // namespace cbclab
