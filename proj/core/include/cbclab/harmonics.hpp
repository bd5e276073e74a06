#pragma once

#include <span>
#include <vector>

namespace cbclab {

/// Truncated Fourier series of a periodic signal at angular frequency omega:
///
///   x(t) ~ a0/2 + sum_{k=1..n_harm} ( a[k-1] cos(k w t) + b[k-1] sin(k w t) )
///
/// The constant term is stored as the coefficient a0 (the series value is a0/2).
struct HarmonicCoeffs {
  double omega = 0.0;        // rad/s, > 0
  int n_harm = 0;            // number of retained harmonics, >= 1
  double a0 = 0.0;           // constant-term coefficient
  std::vector<double> a;     // cosine coefficients, size n_harm
  std::vector<double> b;     // sine coefficients, size n_harm

  static HarmonicCoeffs zero(double omega, int n_harm);

  /// Series value at time t.
  double value_at(double t) const;
  /// Exact time derivative of the series at time t.
  double derivative_at(double t) const;

  double period() const;
  /// Throws ValidationError when omega/n_harm/vector sizes are inconsistent.
  void validate() const;
};

/// Scalar summaries of a harmonic decomposition against its source samples.
struct HarmonicMetrics {
  double fundamental_amplitude = 0.0;  // sqrt(a1^2 + b1^2)
  double fundamental_phase = 0.0;      // in (-pi, pi], signal ~ X cos(w t + phase)
  double higher_harmonic_norm = 0.0;   // sqrt(a0^2/2 + sum_{k>=2}(ak^2+bk^2))
  double residual_rms = 0.0;           // RMS of samples minus synthesized series
};

/// Least-squares Fourier coefficients of a uniformly sampled signal, computed
/// per period by trapezoidal quadrature and averaged over n_periods.
///
/// The samples must cover n_periods whole periods of omega plus the closing
/// sample (n_periods*m + 1 samples with m = round(period/dt)); anything beyond
/// is ignored. The phase reference is t = 0 at the first sample.
HarmonicCoeffs project(std::span<const double> samples, double dt, double omega,
                       int n_harm, int n_periods);

/// Evaluate the series at the given instants.
std::vector<double> synthesize(const HarmonicCoeffs& coeffs, std::span<const double> times);

/// Amplitude/phase/residual summaries. The sample window must be the same
/// integer-period window the coefficients were projected from.
HarmonicMetrics metrics(const HarmonicCoeffs& coeffs, std::span<const double> samples,
                        double dt);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace cbclab
