#pragma once

// Shared helpers for the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cbclab/analytic.hpp"
#include "cbclab/plant.hpp"

namespace testsupport {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFnHz = 19.95;
inline constexpr double kCbcHz = 24.0;

inline cbclab::DuffingParams::Tilde nominal_tilde() {
  return {0.2999, -0.0258, -0.00025, 0.00798};
}

inline cbclab::DuffingParams nominal_params() {
  return cbclab::DuffingParams::from_tilde(kTwoPi * kFnHz, nominal_tilde());
}

inline cbclab::TildeParams nominal_tilde_params() {
  const auto t = nominal_tilde();
  return {t.mu_t, t.nu_t, t.rho_t, t.b_t, kCbcHz / kFnHz};
}

/// One branch point in the (response amplitude, forcing scale) plane.
struct XdPoint {
  double x = 0.0;
  double d = 0.0;
};

/// Largest point-to-polyline distance between two branches, normalized by
/// the spans of the reference branch. Well conditioned through folds, where
/// matching by either coordinate alone degenerates.
inline double branch_distance(const std::vector<XdPoint>& probe,
                              const std::vector<XdPoint>& reference) {
  double x_lo = 1e300, x_hi = -1e300, d_lo = 1e300, d_hi = -1e300;
  for (const auto& p : reference) {
    x_lo = std::min(x_lo, p.x);
    x_hi = std::max(x_hi, p.x);
    d_lo = std::min(d_lo, p.d);
    d_hi = std::max(d_hi, p.d);
  }
  const double sx = std::max(x_hi - x_lo, 1e-12);
  const double sd = std::max(d_hi - d_lo, 1e-12);

  auto seg_dist = [&](const XdPoint& p, const XdPoint& a, const XdPoint& b) {
    const double ax = a.x / sx, ad = a.d / sd;
    const double bx = b.x / sx, bd = b.d / sd;
    const double px = p.x / sx, pd = p.d / sd;
    const double vx = bx - ax, vd = bd - ad;
    const double len2 = vx * vx + vd * vd;
    double t = len2 > 0.0 ? ((px - ax) * vx + (pd - ad) * vd) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = px - (ax + t * vx);
    const double ed = pd - (ad + t * vd);
    return std::sqrt(ex * ex + ed * ed);
  };

  double worst = 0.0;
  for (const auto& p : probe) {
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < reference.size(); ++i) {
      best = std::min(best, seg_dist(p, reference[i], reference[i + 1]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

/// Dense analytic branch over an amplitude range.
inline std::vector<XdPoint> analytic_branch(const cbclab::TildeParams& p, double x_lo,
                                            double x_hi, int n = 4000) {
  std::vector<XdPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (n - 1.0);
    out.push_back({x, cbclab::static_deflection(x, p)});
  }
  return out;
}

}  // namespace testsupport
