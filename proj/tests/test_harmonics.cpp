#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cbclab/errors.hpp"
#include "cbclab/harmonics.hpp"

using namespace cbclab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> sample_series(const HarmonicCoeffs& c, double dt, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = c.value_at(static_cast<double>(i) * dt);
  return out;
}

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

TEST_CASE("project recovers a single cosine") {
  const double omega = kTwoPi * 24.0;
  const int m = 100;
  const double dt = kTwoPi / omega / m;
  std::vector<double> xs(3 * m + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 2.0 * std::cos(omega * i * dt);

  const HarmonicCoeffs c = project(xs, dt, omega, 7, 3);
  CHECK(c.a[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(c.a0) < 1e-10);
  for (int k = 1; k < 7; ++k) {
    CHECK(std::abs(c.a[k]) < 1e-10);
    CHECK(std::abs(c.b[k]) < 1e-10);
  }
  CHECK(std::abs(c.b[0]) < 1e-10);
}

TEST_CASE("project of a constant lands in the a0 term") {
  const double omega = kTwoPi * 5.0;
  const int m = 64;
  const double dt = kTwoPi / omega / m;
  std::vector<double> xs(2 * m + 1, 0.5);
  const HarmonicCoeffs c = project(xs, dt, omega, 3, 2);
  CHECK(0.5 * c.a0 == doctest::Approx(0.5).epsilon(1e-13));
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(c.a[k]) < 1e-12);
    CHECK(std::abs(c.b[k]) < 1e-12);
  }
}

TEST_CASE("synthesize basics") {
  HarmonicCoeffs zero = HarmonicCoeffs::zero(kTwoPi, 4);
  std::vector<double> times{0.0, 0.1, 0.5};
  for (double v : synthesize(zero, times)) CHECK(v == 0.0);

  HarmonicCoeffs c = HarmonicCoeffs::zero(kTwoPi, 2);
  c.a[0] = 3.0;
  c.b[0] = 4.0;
  CHECK(c.value_at(0.0) == doctest::Approx(3.0));
}

TEST_CASE("project(synthesize(c)) round trip at n_harm=7") {
  std::mt19937_64 rng(1234);
  const double omega = kTwoPi * 24.0;
  const int m = 200;
  const double dt = kTwoPi / omega / m;
  for (int trial = 0; trial < 20; ++trial) {
    const HarmonicCoeffs c = random_coeffs(rng, omega, 7);
    const auto xs = sample_series(c, dt, static_cast<std::size_t>(5 * m + 1));
    const HarmonicCoeffs r = project(xs, dt, omega, 7, 5);
    CHECK(std::abs(r.a0 - c.a0) < 1e-10);
    for (int k = 0; k < 7; ++k) {
      CHECK(std::abs(r.a[k] - c.a[k]) < 1e-10);
      CHECK(std::abs(r.b[k] - c.b[k]) < 1e-10);
    }
  }
}

TEST_CASE("metrics fundamentals") {
  const double omega = kTwoPi * 10.0;
  const int m = 128;
  const double dt = kTwoPi / omega / m;

  SUBCASE("3-4-5 amplitude") {
    HarmonicCoeffs c = HarmonicCoeffs::zero(omega, 3);
    c.a[0] = 3.0;
    c.b[0] = 4.0;
    const auto xs = sample_series(c, dt, static_cast<std::size_t>(m + 1));
    const HarmonicMetrics mm = metrics(c, xs, dt);
    CHECK(mm.fundamental_amplitude == doctest::Approx(5.0).epsilon(1e-14));
  }

  SUBCASE("pure cosine has zero phase and zero higher harmonics") {
    HarmonicCoeffs c = HarmonicCoeffs::zero(omega, 5);
    c.a[0] = 1.7;
    const auto xs = sample_series(c, dt, static_cast<std::size_t>(2 * m + 1));
    const HarmonicMetrics mm = metrics(c, xs, dt);
    CHECK(mm.fundamental_phase == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mm.higher_harmonic_norm == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mm.residual_rms < 1e-12);
  }

  SUBCASE("residual rms approximates additive white noise sigma") {
    const double sigma = 0.25;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.0, sigma);
    const int periods = 60;
    std::vector<double> xs(static_cast<std::size_t>(periods * m + 1));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = 1.4 * std::cos(omega * i * dt) + g(rng);
    }
    const HarmonicCoeffs c = project(xs, dt, omega, 7, periods);
    const HarmonicMetrics mm = metrics(c, xs, dt);
    CHECK(mm.residual_rms == doctest::Approx(sigma).epsilon(0.10));
  }
}

TEST_CASE("coefficient averaging shrinks noise like 1/sqrt(periods)") {
  const double omega = kTwoPi * 20.0;
  const int m = 50;
  const double dt = kTwoPi / omega / m;
  const double sigma = 0.1;
  const int trials = 200;

  std::vector<double> a1_one, a1_ten;
  std::mt19937_64 rng(4321);
  std::normal_distribution<double> g(0.0, sigma);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(static_cast<std::size_t>(10 * m + 1));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = std::cos(omega * i * dt) + g(rng);
    }
    a1_one.push_back(
        project({xs.data(), static_cast<std::size_t>(m + 1)}, dt, omega, 7, 1).a[0]);
    a1_ten.push_back(project(xs, dt, omega, 7, 10).a[0]);
  }
  auto stddev = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
  };
  const double ratio = stddev(a1_ten) / stddev(a1_one);
  const double expected = 1.0 / std::sqrt(10.0);
  CHECK(ratio > expected * 0.7);
  CHECK(ratio < expected * 1.3);
}

TEST_CASE("projection is linear") {
  std::mt19937_64 rng(99);
  const double omega = kTwoPi * 7.0;
  const int m = 80;
  const double dt = kTwoPi / omega / m;
  const std::size_t n = static_cast<std::size_t>(2 * m + 1);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> s1(n), s2(n), mix(n);
  for (std::size_t i = 0; i < n; ++i) {
    s1[i] = u(rng);
    s2[i] = u(rng);
  }
  const double alpha = 1.7, beta = -0.4;
  for (std::size_t i = 0; i < n; ++i) mix[i] = alpha * s1[i] + beta * s2[i];

  const auto c1 = project(s1, dt, omega, 5, 2);
  const auto c2 = project(s2, dt, omega, 5, 2);
  const auto cm = project(mix, dt, omega, 5, 2);
  CHECK(std::abs(cm.a0 - (alpha * c1.a0 + beta * c2.a0)) < 1e-10);
  for (int k = 0; k < 5; ++k) {
    CHECK(std::abs(cm.a[k] - (alpha * c1.a[k] + beta * c2.a[k])) < 1e-10);
    CHECK(std::abs(cm.b[k] - (alpha * c1.b[k] + beta * c2.b[k])) < 1e-10);
  }
}

TEST_CASE("Parseval consistency for band-limited signals") {
  std::mt19937_64 rng(2025);
  const double omega = kTwoPi * 12.0;
  const int m = 256;
  const double dt = kTwoPi / omega / m;
  const HarmonicCoeffs c = random_coeffs(rng, omega, 7);
  const auto xs = sample_series(c, dt, static_cast<std::size_t>(4 * m + 1));

  // RMS^2 over whole periods (drop the duplicated closing sample)
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) acc += xs[i] * xs[i];
  const double rms2 = acc / static_cast<double>(xs.size() - 1);

  double series = 0.25 * c.a0 * c.a0;
  for (int k = 0; k < 7; ++k) series += 0.5 * (c.a[k] * c.a[k] + c.b[k] * c.b[k]);
  CHECK(rms2 == doctest::Approx(series).epsilon(1e-8));
}

TEST_CASE("phase convention round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uph(-std::numbers::pi + 1e-6, std::numbers::pi);
  std::uniform_real_distribution<double> uamp(0.1, 5.0);
  const double omega = kTwoPi * 9.0;
  const int m = 90;
  const double dt = kTwoPi / omega / m;
  for (int t = 0; t < 25; ++t) {
    const double amp = uamp(rng);
    const double phase = uph(rng);
    std::vector<double> xs(static_cast<std::size_t>(m + 1));
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = amp * std::cos(omega * i * dt + phase);
    const auto c = project(xs, dt, omega, 5, 1);
    const auto mm = metrics(c, xs, dt);
    CHECK(mm.fundamental_amplitude == doctest::Approx(amp).epsilon(1e-8));
    CHECK(mm.fundamental_phase == doctest::Approx(phase).epsilon(1e-8));
  }
}

TEST_CASE("projection input validation") {
  const double omega = kTwoPi * 10.0;
  std::vector<double> xs(1000, 0.0);

  // too few samples per period for the harmonic count
  CHECK_THROWS_AS(project(xs, kTwoPi / omega / 10.0, omega, 7, 1), ValidationError);
  // grid does not tile the period
  CHECK_THROWS_AS(project(xs, 1.013 * kTwoPi / omega / 33.0, omega, 3, 9), ValidationError);
  // not enough samples for the requested periods
  std::vector<double> short_xs(50, 0.0);
  CHECK_THROWS_AS(project(short_xs, kTwoPi / omega / 64.0, omega, 3, 2), ValidationError);
}

TEST_CASE("metrics rejects a mismatched window") {
  const double omega = kTwoPi * 10.0;
  const int m = 64;
  const double dt = kTwoPi / omega / m;
  HarmonicCoeffs c = HarmonicCoeffs::zero(omega, 3);
  c.a[0] = 1.0;
  std::vector<double> xs(static_cast<std::size_t>(m / 2), 0.0);  // half a period
  CHECK_THROWS_AS(metrics(c, xs, dt), ValidationError);
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3.0 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(0.1 - 4.0 * std::numbers::pi) == doctest::Approx(0.1));
}
