#include "cbclab/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cbclab/errors.hpp"

namespace cbclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Samples per period of the uniform grid, validated against the window length.
// Allows one sample of slack between n_periods*period and the sample span.
int samples_per_period(std::size_t n_samples, double dt, double omega, int n_harm,
                       int n_periods) {
  if (!(omega > 0.0)) throw ValidationError("project: omega must be positive");
  if (!(dt > 0.0)) throw ValidationError("project: dt must be positive");
  if (n_harm < 1) throw ValidationError("project: n_harm must be >= 1");
  if (n_periods < 1) throw ValidationError("project: n_periods must be >= 1");

  const double period = kTwoPi / omega;
  const int m = static_cast<int>(std::lround(period / dt));
  if (m < 2 * n_harm + 1) {
    throw ValidationError("project: need at least 2*n_harm+1 samples per period, got " +
                          std::to_string(m));
  }
  // Grid must tile the period to within one sample over the whole window.
  const double coverage_err = std::abs(period - m * dt) * n_periods;
  if (coverage_err > dt) {
    throw ValidationError("project: sample grid does not cover whole periods (off by " +
                          std::to_string(coverage_err / dt) + " samples)");
  }
  const std::size_t needed = static_cast<std::size_t>(n_periods) * m + 1;
  if (n_samples < needed) {
    throw ValidationError("project: need " + std::to_string(needed) + " samples for " +
                          std::to_string(n_periods) + " periods, got " +
                          std::to_string(n_samples));
  }
  return m;
}

}  // namespace

HarmonicCoeffs HarmonicCoeffs::zero(double omega, int n_harm) {
  HarmonicCoeffs c;
  c.omega = omega;
  c.n_harm = n_harm;
  c.a.assign(static_cast<std::size_t>(n_harm), 0.0);
  c.b.assign(static_cast<std::size_t>(n_harm), 0.0);
  return c;
}

double HarmonicCoeffs::value_at(double t) const {
  double v = 0.5 * a0;
  for (int k = 1; k <= n_harm; ++k) {
    const double kwt = k * omega * t;
    v += a[k - 1] * std::cos(kwt) + b[k - 1] * std::sin(kwt);
  }
  return v;
}

double HarmonicCoeffs::derivative_at(double t) const {
  double v = 0.0;
  for (int k = 1; k <= n_harm; ++k) {
    const double kw = k * omega;
    v += kw * (b[k - 1] * std::cos(kw * t) - a[k - 1] * std::sin(kw * t));
  }
  return v;
}

double HarmonicCoeffs::period() const { return kTwoPi / omega; }

void HarmonicCoeffs::validate() const {
  if (!(omega > 0.0)) throw ValidationError("HarmonicCoeffs: omega must be positive");
  if (n_harm < 1) throw ValidationError("HarmonicCoeffs: n_harm must be >= 1");
  if (a.size() != static_cast<std::size_t>(n_harm) ||
      b.size() != static_cast<std::size_t>(n_harm)) {
    throw ValidationError("HarmonicCoeffs: coefficient vectors must have n_harm entries");
  }
}

HarmonicCoeffs project(std::span<const double> samples, double dt, double omega,
                       int n_harm, int n_periods) {
  const int m = samples_per_period(samples.size(), dt, omega, n_harm, n_periods);

  HarmonicCoeffs out = HarmonicCoeffs::zero(omega, n_harm);
  // Quadrature phase grid: sample i of a period sits at angle 2*pi*i/m from the
  // window start, which keeps the trapezoid rule exact for band-limited input.
  const double dphi = kTwoPi / m;

  for (int p = 0; p < n_periods; ++p) {
    const std::size_t base = static_cast<std::size_t>(p) * m;
    // Phase of this period's first sample, reduced mod 2*pi to keep the
    // trig arguments small.
    const double phi0 = std::remainder(omega * (static_cast<double>(base) * dt), kTwoPi);
    double a0_acc = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double w = (i == 0 || i == m) ? 0.5 : 1.0;
      a0_acc += w * samples[base + i];
    }
    out.a0 += 2.0 * a0_acc / m;
    for (int k = 1; k <= n_harm; ++k) {
      double ca = 0.0;
      double sa = 0.0;
      for (int i = 0; i <= m; ++i) {
        const double w = (i == 0 || i == m) ? 0.5 : 1.0;
        const double ang = k * (phi0 + i * dphi);
        const double s = samples[base + i];
        ca += w * s * std::cos(ang);
        sa += w * s * std::sin(ang);
      }
      out.a[k - 1] += 2.0 * ca / m;
      out.b[k - 1] += 2.0 * sa / m;
    }
  }

  const double inv_p = 1.0 / n_periods;
  out.a0 *= inv_p;
  for (int k = 0; k < n_harm; ++k) {
    out.a[k] *= inv_p;
    out.b[k] *= inv_p;
  }
  return out;
}

std::vector<double> synthesize(const HarmonicCoeffs& coeffs, std::span<const double> times) {
  coeffs.validate();
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = coeffs.value_at(times[i]);
  return out;
}

HarmonicMetrics metrics(const HarmonicCoeffs& coeffs, std::span<const double> samples,
                        double dt) {
  coeffs.validate();
  if (samples.size() < 2) throw ValidationError("metrics: empty sample window");
  // The window must span whole periods of the projection grid.
  const double period = coeffs.period();
  const double span = static_cast<double>(samples.size() - 1) * dt;
  const double n_per = span / period;
  if (std::abs(n_per - std::lround(n_per)) * period > dt) {
    throw ValidationError("metrics: sample window is not an integer number of periods");
  }

  HarmonicMetrics m;
  const double a1 = coeffs.a[0];
  const double b1 = coeffs.b[0];
  m.fundamental_amplitude = std::hypot(a1, b1);
  m.fundamental_phase = (a1 == 0.0 && b1 == 0.0) ? 0.0 : wrap_angle(std::atan2(-b1, a1));

  double hh2 = 0.5 * coeffs.a0 * coeffs.a0;
  for (int k = 2; k <= coeffs.n_harm; ++k) {
    hh2 += coeffs.a[k - 1] * coeffs.a[k - 1] + coeffs.b[k - 1] * coeffs.b[k - 1];
  }
  m.higher_harmonic_norm = std::sqrt(hh2);

  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = samples[i] - coeffs.value_at(static_cast<double>(i) * dt);
    acc += r * r;
  }
  m.residual_rms = std::sqrt(acc / static_cast<double>(samples.size()));
  return m;
}

double wrap_angle(double angle) {
  double w = std::remainder(angle, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

}  // namespace cbclab
