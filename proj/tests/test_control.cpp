#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cbclab/control.hpp"
#include "cbclab/errors.hpp"
#include "cbclab/harmonics.hpp"
#include "cbclab/plant.hpp"

using namespace cbclab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

HarmonicCoeffs random_coeffs(std::mt19937_64& rng, double omega, int n_harm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HarmonicCoeffs c = HarmonicCoeffs::zero(omega, n_harm);
  c.a0 = u(rng);
  for (int k = 0; k < n_harm; ++k) {
    c.a[k] = u(rng);
    c.b[k] = u(rng);
  }
  return c;
}

}  // namespace

TEST_CASE("control target enforces the phase constraint") {
  ControlTarget t;
  t.coeffs = HarmonicCoeffs::zero(kTwoPi, 3);
  t.coeffs.b[0] = 1.0;
  CHECK_NOTHROW(t.validate());
  t.coeffs.a[0] = 0.1;
  CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("proportional-only control force") {
  ControlTarget t;
  t.coeffs = HarmonicCoeffs::zero(kTwoPi, 2);
  // constant target 0.2 above the measurement
  t.coeffs.a0 = 0.4;
  const double f = control_force(0.0, 0.0, 1e-3, t, ControlGains{1.0, 0.0}, 0.0);
  CHECK(f == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("on-target control force vanishes with the step size") {
  const double omega = kTwoPi * 24.0;
  ControlTarget t;
  t.coeffs = HarmonicCoeffs::zero(omega, 7);
  t.coeffs.b[0] = 1.3;
  t.coeffs.a[1] = 0.2;
  const ControlGains gains{50.0, 2.0};

  const double tt = 0.137;
  for (double dt : {1e-3, 1e-4, 1e-5}) {
    const double x_now = t.coeffs.value_at(tt);
    const double x_prev = t.coeffs.value_at(tt - dt);
    const double f = control_force(x_now, x_prev, dt, t, gains, tt);
    // backward difference lags by O(dt), so |force| <= kd * C * dt
    CHECK(std::abs(f) <= gains.kd * 0.75 * omega * omega * 1.5 * dt);
  }
}

TEST_CASE("forcing coefficients reduce correctly") {
  const double omega = kTwoPi * 24.0;
  std::mt19937_64 rng(7);
  const HarmonicCoeffs resp = random_coeffs(rng, omega, 7);

  SUBCASE("target equal to response leaves only the open-loop part") {
    ControlTarget t;
    t.coeffs = resp;
    t.coeffs.a[0] = 0.0;
    HarmonicCoeffs r2 = resp;
    r2.a[0] = 0.0;  // match the constrained fundamental
    const HarmonicCoeffs f =
        forcing_coefficients(1.5, -0.7, t, r2, ControlGains{40.0, 3.0}, omega);
    CHECK(f.a[0] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(f.b[0] == doctest::Approx(-0.7).epsilon(1e-14));
    CHECK(f.a0 == 0.0);
    for (int k = 1; k < 7; ++k) {
      CHECK(f.a[k] == 0.0);
      CHECK(f.b[k] == 0.0);
    }
  }

  SUBCASE("kd = 0 leaves the pure proportional form") {
    ControlTarget t;
    t.coeffs = HarmonicCoeffs::zero(omega, 7);
    t.coeffs.b[0] = 2.0;
    const double kp = 13.0;
    const HarmonicCoeffs f = forcing_coefficients(0.3, 0.1, t, resp, ControlGains{kp, 0.0}, omega);
    CHECK(f.a[0] == doctest::Approx(0.3 + kp * (0.0 - resp.a[0])).epsilon(1e-14));
    CHECK(f.b[0] == doctest::Approx(0.1 + kp * (2.0 - resp.b[0])).epsilon(1e-14));
    for (int k = 1; k < 7; ++k) {
      CHECK(f.a[k] == doctest::Approx(kp * -resp.a[k]).epsilon(1e-14));
      CHECK(f.b[k] == doctest::Approx(kp * -resp.b[k]).epsilon(1e-14));
    }
  }

  SUBCASE("frequency or harmonic mismatch is rejected") {
    ControlTarget t;
    t.coeffs = HarmonicCoeffs::zero(omega * 1.01, 7);
    CHECK_THROWS_AS(forcing_coefficients(0, 0, t, resp, ControlGains{}, omega),
                    ValidationError);
    ControlTarget t2;
    t2.coeffs = HarmonicCoeffs::zero(omega, 5);
    CHECK_THROWS_AS(forcing_coefficients(0, 0, t2, resp, ControlGains{}, omega),
                    ValidationError);
  }
}

TEST_CASE("forcing coefficients equal the projection of the synthesized control law") {
  // The algebra must match what the time-domain law produces for band-limited
  // signals; this pins the sign convention of the derivative cross terms.
  const double omega = kTwoPi * 24.0;
  const int m = 256;
  const double dt = kTwoPi / omega / m;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int trial = 0; trial < 10; ++trial) {
    HarmonicCoeffs resp = random_coeffs(rng, omega, 7);
    ControlTarget t;
    t.coeffs = random_coeffs(rng, omega, 7);
    t.coeffs.a[0] = 0.0;
    const ControlGains gains{5.0 * u(rng) + 6.0, 0.5 * u(rng) + 0.6};
    const double a_open = 2.0 * u(rng);
    const double b_open = 2.0 * u(rng);

    std::vector<double> f_samples(static_cast<std::size_t>(2 * m + 1));
    for (std::size_t i = 0; i < f_samples.size(); ++i) {
      const double tt = static_cast<double>(i) * dt;
      const double ctrl = gains.kp * (t.coeffs.value_at(tt) - resp.value_at(tt)) +
                          gains.kd * (t.coeffs.derivative_at(tt) - resp.derivative_at(tt));
      f_samples[i] = a_open * std::cos(omega * tt) + b_open * std::sin(omega * tt) + ctrl;
    }
    const HarmonicCoeffs projected = project(f_samples, dt, omega, 7, 2);
    const HarmonicCoeffs algebraic =
        forcing_coefficients(a_open, b_open, t, resp, gains, omega);

    CHECK(std::abs(projected.a0 - algebraic.a0) < 1e-8);
    for (int k = 0; k < 7; ++k) {
      CHECK(std::abs(projected.a[k] - algebraic.a[k]) < 1e-8);
      CHECK(std::abs(projected.b[k] - algebraic.b[k]) < 1e-8);
    }
  }
}

TEST_CASE("forcing coefficients are affine in the gains") {
  const double omega = kTwoPi * 24.0;
  std::mt19937_64 rng(3);
  const HarmonicCoeffs resp = random_coeffs(rng, omega, 7);
  ControlTarget t;
  t.coeffs = random_coeffs(rng, omega, 7);
  t.coeffs.a[0] = 0.0;

  const HarmonicCoeffs f00 = forcing_coefficients(1.0, 0.5, t, resp, {0.0, 0.0}, omega);
  const HarmonicCoeffs f10 = forcing_coefficients(1.0, 0.5, t, resp, {1.0, 0.0}, omega);
  const HarmonicCoeffs f01 = forcing_coefficients(1.0, 0.5, t, resp, {0.0, 1.0}, omega);
  const double kp = 17.0, kd = 4.0;
  const HarmonicCoeffs f = forcing_coefficients(1.0, 0.5, t, resp, {kp, kd}, omega);
  for (int k = 0; k < 7; ++k) {
    const double lin_a = f00.a[k] + kp * (f10.a[k] - f00.a[k]) + kd * (f01.a[k] - f00.a[k]);
    const double lin_b = f00.b[k] + kp * (f10.b[k] - f00.b[k]) + kd * (f01.b[k] - f00.b[k]);
    CHECK(f.a[k] == doctest::Approx(lin_a).epsilon(1e-12));
    CHECK(f.b[k] == doctest::Approx(lin_b).epsilon(1e-12));
  }
}

TEST_CASE("closed-loop linear plant matches the algebraic prediction") {
  // Small derivative gain and a fine grid keep the backward-difference and
  // hold distortions below the comparison tolerance.
  DuffingParams p;
  p.omega_n = kTwoPi * 5.0;
  p.b = 2.0 * 0.05 * p.omega_n;
  const double f_hz = 4.6;
  const double omega = kTwoPi * f_hz;
  const int m = 2000;
  const double dt = 1.0 / (f_hz * m);

  ControlTarget target;
  target.coeffs = HarmonicCoeffs::zero(omega, 7);
  target.coeffs.b[0] = 0.012;  // deliberately detuned from the open-loop response
  const ControlGains gains{2.0, 0.01};
  const double a_open = 0.02, b_open = 0.0;

  SimOptions so;
  so.dt = dt;
  PlantSim plant(p, NoiseConfig{}, PlantState{}, so);
  double x_prev = 0.0;
  auto tick = [&](bool record, std::vector<double>* xs, std::vector<double>* fs) {
    const double x_now = plant.state().x;
    const double tt = plant.state().t;
    const double ctrl = control_force(x_now, x_prev, dt, target, gains, tt);
    const double f_now = a_open * std::cos(omega * tt) + b_open * std::sin(omega * tt) + ctrl;
    if (record) {
      xs->push_back(x_now);
      fs->push_back(f_now);
    }
    plant.step([&](double ts) { return a_open * std::cos(omega * ts) + b_open * std::sin(omega * ts); },
               ctrl);
    x_prev = x_now;
  };

  for (int i = 0; i < 200 * m; ++i) tick(false, nullptr, nullptr);
  std::vector<double> xs, fs;
  for (int i = 0; i < 10 * m + 1; ++i) {
    if (i < 10 * m) {
      tick(true, &xs, &fs);
    } else {
      const double x_now = plant.state().x;
      const double tt = plant.state().t;
      const double ctrl = control_force(x_now, x_prev, dt, target, gains, tt);
      xs.push_back(x_now);
      fs.push_back(a_open * std::cos(omega * tt) + b_open * std::sin(omega * tt) + ctrl);
    }
  }

  const HarmonicCoeffs resp = project(xs, dt, omega, 7, 10);
  const HarmonicCoeffs f_meas = project(fs, dt, omega, 7, 10);
  const HarmonicCoeffs f_pred = forcing_coefficients(a_open, b_open, target, resp, gains, omega);

  CHECK(std::abs(f_meas.a[0] - f_pred.a[0]) < 1e-6);
  CHECK(std::abs(f_meas.b[0] - f_pred.b[0]) < 1e-6);
  for (int k = 1; k < 7; ++k) {
    CHECK(std::abs(f_meas.a[k] - f_pred.a[k]) < 1e-6);
    CHECK(std::abs(f_meas.b[k] - f_pred.b[k]) < 1e-6);
  }
}
