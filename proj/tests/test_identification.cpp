#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cbclab/analytic.hpp"
#include "cbclab/errors.hpp"
#include "cbclab/identification.hpp"
#include "support.hpp"

using namespace cbclab;
using namespace testsupport;

namespace {

const ParamVector kTruth{0.2999, -0.0258, -0.00025, 0.00798, 0.02496};
const double kZeta = kCbcHz / kFnHz;

Dataset synthetic_dataset(const ParamVector& p, int n, double sigma, std::uint64_t seed,
                          double x_lo = 0.05, double x_hi = 2.4) {
  Dataset d;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (n - 1.0);
    const TildeParams tp{p.mu_t, p.nu_t, p.rho_t, p.b_t, kZeta};
    double a = static_deflection(x, tp) / p.c_a;
    if (sigma > 0.0) a += g(rng);
    d.points.push_back({a, kZeta, x});
  }
  return d;
}

}  // namespace

TEST_CASE("objective basics") {
  const Dataset d = synthetic_dataset(kTruth, 30, 0.0, 0);

  SUBCASE("zero at the generating parameters") { CHECK(objective(d, kTruth) < 1e-18); }

  SUBCASE("any single-parameter perturbation increases it") {
    for (int j = 0; j < 5; ++j) {
      for (double scale : {0.9, 1.1}) {
        auto p = kTruth.to_array();
        p[j] = p[j] != 0.0 ? p[j] * scale : 0.01 * (scale - 1.0);
        CHECK(objective(d, ParamVector::from_array(p)) > 1e-12);
      }
    }
  }

  SUBCASE("empty dataset sums to zero") {
    Dataset empty;
    CHECK(objective(empty, kTruth) == 0.0);
  }

  SUBCASE("zero scale factor is rejected") {
    ParamVector bad = kTruth;
    bad.c_a = 0.0;
    CHECK_THROWS_AS(objective(d, bad), ValidationError);
  }
}

TEST_CASE("noise-free fit recovers the generating parameters") {
  const Dataset d = synthetic_dataset(kTruth, 48, 0.0, 0);
  const ParamVector init{0.5, 0.0, 0.0, 0.02, 0.05};
  const FitResult fr = fit(d, init);

  CHECK(fr.converged);
  CHECK(std::abs(fr.p_star.mu_t / kTruth.mu_t - 1.0) < 1e-3);
  CHECK(std::abs(fr.p_star.nu_t / kTruth.nu_t - 1.0) < 1e-3);
  CHECK(std::abs(fr.p_star.rho_t - kTruth.rho_t) < 1e-3);
  CHECK(std::abs(fr.p_star.b_t - kTruth.b_t) < 1e-3);
  CHECK(std::abs(fr.p_star.c_a / kTruth.c_a - 1.0) < 1e-4);
  CHECK(objective(d, fr.p_star) <= objective(d, init));
}

TEST_CASE("small-amplitude data cannot identify the nonlinear shape") {
  // in the linear regime the cubic/quintic/septic terms are invisible
  const Dataset d = synthetic_dataset(kTruth, 40, 1e-5, 3, 0.001, 0.02);
  const FitResult fr = fit(d, kTruth);
  CHECK(fr.estd[0] > std::abs(kTruth.mu_t));
  CHECK(fr.estd[1] > std::abs(kTruth.nu_t));
  CHECK(fr.estd[2] > std::abs(kTruth.rho_t));
}

TEST_CASE("fit input validation") {
  Dataset tiny = synthetic_dataset(kTruth, 4, 0.0, 0);
  CHECK_THROWS_AS(fit(tiny, kTruth), ValidationError);
  Dataset five = synthetic_dataset(kTruth, 5, 0.0, 0);
  CHECK_THROWS_AS(asymptotic_stddev(five, kTruth), ValidationError);
}

TEST_CASE("asymptotic standard deviations calibrate against Monte Carlo scatter") {
  const double sigma = 0.1;
  const int trials = 60;
  std::vector<std::array<double, 5>> results;
  std::array<double, 5> estd_mean{};
  for (int t = 0; t < trials; ++t) {
    const Dataset d = synthetic_dataset(kTruth, 48, sigma, 500 + t);
    const FitResult fr = fit(d, kTruth);
    results.push_back(fr.p_star.to_array());
    for (int k = 0; k < 5; ++k) estd_mean[k] += fr.estd[k] / trials;
  }
  std::array<double, 5> mean{}, sd{};
  for (const auto& r : results) {
    for (int k = 0; k < 5; ++k) mean[k] += r[k] / trials;
  }
  for (const auto& r : results) {
    for (int k = 0; k < 5; ++k) sd[k] += (r[k] - mean[k]) * (r[k] - mean[k]);
  }
  for (int k = 0; k < 5; ++k) {
    sd[k] = std::sqrt(sd[k] / (trials - 1));
    const double ratio = estd_mean[k] / sd[k];
    CHECK(ratio > 1.0 / 1.5);
    CHECK(ratio < 1.5);
  }
}

TEST_CASE("vanishing damping makes its deviation explode with a flag") {
  ParamVector singular = kTruth;
  singular.b_t = 1e-9;
  const Dataset d = synthetic_dataset(singular, 48, 1e-3, 9);
  const StddevResult sd = asymptotic_stddev(d, singular);
  CHECK(sd.estd[3] > 1e2 * std::abs(kTruth.b_t));  // blown-up deviation
  CHECK(sd.singular_flags[3]);
  CHECK_FALSE(sd.singular_flags[0]);
  CHECK_FALSE(sd.singular_flags[4]);
}

TEST_CASE("duplicating every point shrinks deviations by sqrt(2)") {
  Dataset d = synthetic_dataset(kTruth, 48, 0.05, 12);
  const StddevResult base = asymptotic_stddev(d, kTruth);
  Dataset doubled = d;
  for (const auto& p : d.points) doubled.points.push_back(p);
  const StddevResult twice = asymptotic_stddev(doubled, kTruth);
  for (int k = 0; k < 5; ++k) {
    // sigma^2 uses m-5 dof, so the ratio is sqrt((m-5)/(2m-5)/...) ~ 1/sqrt(2)
    const double ratio = twice.estd[k] / base.estd[k];
    CHECK(ratio == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(0.05));
  }
}

TEST_CASE("production gradient matches a 4th-order reference") {
  // drive the production finite-difference gradient through a unit-covariance
  // confidence band: half-width = z * ||grad||, and compare against an
  // independent 4th-order stencil
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(0.2, 2.2);
  const ParamVector p{0.31, -0.02, -0.0004, 0.012, 0.021};
  auto model = [&](const std::array<double, 5>& q, double x) {
    const TildeParams tp{q[0], q[1], q[2], q[3], kZeta};
    return static_deflection(x, tp) / q[4];
  };

  FitResult fr;
  fr.p_star = p;
  for (int k = 0; k < 5; ++k) fr.covariance[k][k] = 1.0;

  const double z = normal_quantile(0.975);
  for (int t = 0; t < 10; ++t) {
    const double x = ux(rng);
    std::vector<double> grid{x};
    const auto band = confidence_band(fr, kZeta, grid, 0.95);
    const double grad_norm_prod = (band[0].second - band[0].first) / (2.0 * z);

    const auto pa = p.to_array();
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) {
      const double h = std::max(1e-6 * std::abs(pa[j]), 1e-9);
      auto qp = pa, qm = pa, qp2 = pa, qm2 = pa;
      qp[j] += h;
      qm[j] -= h;
      qp2[j] += 2.0 * h;
      qm2[j] -= 2.0 * h;
      const double fd4 =
          (-model(qp2, x) + 8.0 * model(qp, x) - 8.0 * model(qm, x) + model(qm2, x)) /
          (12.0 * h);
      acc += fd4 * fd4;
    }
    const double grad_norm_ref = std::sqrt(acc);
    CHECK(std::abs(grad_norm_prod - grad_norm_ref) / grad_norm_ref < 1e-5);
  }
}

TEST_CASE("confidence bands") {
  const Dataset d = synthetic_dataset(kTruth, 48, 0.05, 21);
  FitResult fr = fit(d, kTruth);
  std::vector<double> grid{0.3, 0.8, 1.3, 1.9};

  SUBCASE("zero covariance collapses the band onto the curve") {
    FitResult flat = fr;
    flat.covariance = Matrix5{};
    const auto band = confidence_band(flat, kZeta, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(band[i].first == doctest::Approx(band[i].second));
    }
  }

  SUBCASE("width scales with the Gaussian quantile") {
    const auto b95 = confidence_band(fr, kZeta, grid, 0.95);
    const auto b99 = confidence_band(fr, kZeta, grid, 0.99);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double w95 = b95[i].second - b95[i].first;
      const double w99 = b99[i].second - b99[i].first;
      if (w95 > 0.0) {
        CHECK(w99 / w95 == doctest::Approx(2.575829 / 1.959964).epsilon(1e-6));
      }
    }
  }

  SUBCASE("normal quantile reference values") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.575829).epsilon(1e-6));
  }
}

TEST_CASE("dimensional recovery") {
  SUBCASE("zeros map to zeros") {
    const DuffingParams p = recover_dimensional(ParamVector{0, 0, 0, 0, 1.0}, 2.0);
    CHECK(p.b == 0.0);
    CHECK(p.mu == 0.0);
    CHECK(p.nu == 0.0);
    CHECK(p.rho == 0.0);
  }
  SUBCASE("round trip with the tilde view is the identity") {
    const double wn = kTwoPi * kFnHz;
    const DuffingParams p = recover_dimensional(kTruth, wn);
    const auto t = p.tilde();
    CHECK(t.mu_t == doctest::Approx(kTruth.mu_t).epsilon(1e-15));
    CHECK(t.nu_t == doctest::Approx(kTruth.nu_t).epsilon(1e-15));
    CHECK(t.rho_t == doctest::Approx(kTruth.rho_t).epsilon(1e-15));
    CHECK(t.b_t == doctest::Approx(kTruth.b_t).epsilon(1e-15));
  }
  SUBCASE("cubic coefficient arithmetic") {
    const double wn = kTwoPi * 19.95;
    const DuffingParams p = recover_dimensional(ParamVector{0.2997, 0, 0, 0, 1.0}, wn);
    CHECK(p.mu == doctest::Approx(0.2997 * wn * wn).epsilon(1e-14));
  }
}

TEST_CASE("objective is invariant under the acceleration/scale rescaling") {
  const Dataset d = synthetic_dataset(kTruth, 30, 0.02, 8);
  const double s = 3.7;
  Dataset scaled = d;
  for (auto& p : scaled.points) p.a_base *= s;
  ParamVector q = kTruth;
  q.c_a /= s;
  CHECK(objective(scaled, q) ==
        doctest::Approx(s * s * objective(d, kTruth)).epsilon(1e-12));

  // fitting the rescaled data moves only the scale parameter
  FitBounds bounds;
  bounds.lower[4] = 1e-5;  // keep c_a/s inside the box
  const FitResult fr = fit(scaled, ParamVector{0.5, 0.0, 0.0, 0.02, 0.05 / s}, bounds);
  CHECK(std::abs(fr.p_star.mu_t / kTruth.mu_t - 1.0) < 1e-5);
  CHECK(std::abs(fr.p_star.c_a * s / kTruth.c_a - 1.0) < 1e-5);
}
