// Serial reference kernels against their OpenMP counterparts. On a
// single-core machine the pairs should time alike; the parallel variants are
// bit-identical to the serial ones (see the unit tests).

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "kfp/landau.hpp"
#include "kfp/sampling.hpp"
#include "kfp/solver.hpp"

namespace {

kfp::VelocityGridFunction landau_profile(int n) {
  const kfp::VelocityGrid g{2, n, 4.0};
  return kfp::maxwellian(g);
}

kfp::LandauParams landau_params() {
  kfp::LandauParams p;
  p.d = 2;
  p.gamma = -1.0;
  return p;
}

void BM_LandauDirectSerial(benchmark::State& state) {
  const auto f = landau_profile(static_cast<int>(state.range(0)));
  const auto p = landau_params();
  for (auto _ : state) benchmark::DoNotOptimize(kfp::landau_fields_direct_serial(f, p));
}

void BM_LandauDirectParallel(benchmark::State& state) {
  const auto f = landau_profile(static_cast<int>(state.range(0)));
  const auto p = landau_params();
  for (auto _ : state) benchmark::DoNotOptimize(kfp::landau_fields_direct(f, p));
}

void BM_LandauFft(benchmark::State& state) {
  const auto f = landau_profile(static_cast<int>(state.range(0)));
  const auto p = landau_params();
  for (auto _ : state) benchmark::DoNotOptimize(kfp::landau_fields_fft(f, p));
}

kfp::SolverConfig solver_config(int n) {
  kfp::SolverConfig cfg;
  cfg.grid = kfp::PhaseGrid{1, n, n, 2.0, 2.0};
  cfg.dt = 1.0 / n;
  kfp::FieldRecipe r;
  r.kind = kfp::Recipe::Checkerboard;
  cfg.field = std::make_shared<const kfp::CoefficientField>(1, r, kfp::EllipticityBounds{0.5, 2.0}, 1);
  return cfg;
}

std::vector<double> state_values(const kfp::SolverConfig& cfg) {
  std::vector<double> v(cfg.grid.size());
  kfp::CounterRng rng(1);
  for (double& x : v) x = rng.uniform();
  return v;
}

void BM_TransportSerial(benchmark::State& state) {
  const auto cfg = solver_config(static_cast<int>(state.range(0)));
  auto v = state_values(cfg);
  for (auto _ : state) kfp::transport_step_serial(v, cfg, 0.5 * cfg.dt);
}

void BM_TransportParallel(benchmark::State& state) {
  const auto cfg = solver_config(static_cast<int>(state.range(0)));
  auto v = state_values(cfg);
  for (auto _ : state) kfp::transport_step(v, cfg, 0.5 * cfg.dt);
}

void BM_VelocitySerial(benchmark::State& state) {
  const auto cfg = solver_config(static_cast<int>(state.range(0)));
  auto v = state_values(cfg);
  for (auto _ : state) kfp::velocity_step_serial(v, cfg, 0.5, cfg.dt);
}

void BM_VelocityParallel(benchmark::State& state) {
  const auto cfg = solver_config(static_cast<int>(state.range(0)));
  auto v = state_values(cfg);
  for (auto _ : state) kfp::velocity_step(v, cfg, 0.5, cfg.dt);
}

}  // namespace

BENCHMARK(BM_LandauDirectSerial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LandauDirectParallel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LandauFft)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransportSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TransportParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_VelocitySerial)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_VelocityParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
