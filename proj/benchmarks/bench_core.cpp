#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cbclab/analytic.hpp"
#include "cbclab/collocation.hpp"
#include "cbclab/harmonics.hpp"
#include "cbclab/identification.hpp"
#include "cbclab/plant.hpp"

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cbclab::DuffingParams nominal() {
  return cbclab::DuffingParams::from_tilde(kTwoPi * 19.95,
                                           {0.2999, -0.0258, -0.00025, 0.00798});
}

void BM_Project(benchmark::State& state) {
  const double omega = kTwoPi * 24.0;
  const int m = 500;
  const double dt = kTwoPi / omega / m;
  std::vector<double> samples(10 * m + 1);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = static_cast<double>(i) * dt;
    samples[i] = 1.3 * std::cos(omega * t) + 0.2 * std::sin(3.0 * omega * t);
  }
  for (auto _ : state) {
    auto c = cbclab::project(samples, dt, omega, 7, 10);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_Project);

void BM_PlantStep(benchmark::State& state) {
  cbclab::SimOptions opts;
  opts.dt = 1e-4;
  cbclab::PlantSim sim(nominal(), cbclab::NoiseConfig{}, cbclab::PlantState{0.5, 0.0, 0.0}, opts);
  const double omega = kTwoPi * 24.0;
  auto force = [omega](double t) { return 500.0 * std::cos(omega * t); };
  for (auto _ : state) {
    sim.step(force);
    benchmark::DoNotOptimize(sim.state().x);
  }
}
BENCHMARK(BM_PlantStep);

void BM_StaticDeflection(benchmark::State& state) {
  const cbclab::TildeParams p{0.2999, -0.0258, -0.00025, 0.00798, 24.0 / 19.95};
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-9;
    benchmark::DoNotOptimize(cbclab::static_deflection(1.2 + x, p));
  }
}
BENCHMARK(BM_StaticDeflection);

void BM_CollocSolve(benchmark::State& state) {
  const auto params = nominal();
  const double omega = kTwoPi * 24.0;
  const cbclab::TildeParams tp{0.2999, -0.0258, -0.00025, 0.00798, 24.0 / 19.95};
  const double x0 = 0.4;
  const auto guess = cbclab::fundamental_guess(x0, cbclab::phase_angle(x0, tp), omega, 15);
  const double d0 = cbclab::static_deflection(x0, tp);
  for (auto _ : state) {
    auto sol = cbclab::solve_periodic(params, d0, omega, guess);
    benchmark::DoNotOptimize(sol.x_amp);
  }
}
BENCHMARK(BM_CollocSolve);

void BM_Objective(benchmark::State& state) {
  const cbclab::TildeParams tp{0.2999, -0.0258, -0.00025, 0.00798, 24.0 / 19.95};
  cbclab::Dataset data;
  for (int i = 0; i < 50; ++i) {
    const double x = 0.05 + 0.05 * i;
    data.points.push_back({cbclab::static_deflection(x, tp) / 0.025, tp.zeta, x});
  }
  const cbclab::ParamVector p{0.3, -0.03, 0.0, 0.01, 0.025};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cbclab::objective(data, p));
  }
}
BENCHMARK(BM_Objective);

}  // namespace

BENCHMARK_MAIN();
