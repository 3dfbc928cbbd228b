// Serial reference vs OpenMP path for the data-parallel kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "hypofrac/fbm.hpp"
#include "hypofrac/frac.hpp"
#include "hypofrac/kernels.hpp"
#include "hypofrac/malliavin.hpp"
#include "hypofrac/poly.hpp"
#include "hypofrac/sde.hpp"

using namespace hypofrac;

namespace {

Exec mode(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_ToeplitzBilinear(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(1));
  const auto w = frac::cell_masses(Hurst(0.7), n, 1.0 / static_cast<double>(n));
  const Mat a = Mat::Random(2, static_cast<Eigen::Index>(n));
  const Mat b = Mat::Random(2, static_cast<Eigen::Index>(n));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::toeplitz_bilinear(w, a, b, mode(state)));
  label(state);
}
BENCHMARK(BM_ToeplitzBilinear)->ArgsProduct({{0, 1}, {1024, 4096}})->Unit(benchmark::kMillisecond);

void BM_HolderSeminorm(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(1));
  const Mat v = Mat::Random(1, n + 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::holder_seminorm(v, 1.0 / static_cast<double>(n), 0.5, mode(state)));
  label(state);
}
BENCHMARK(BM_HolderSeminorm)->ArgsProduct({{0, 1}, {2048}})->Unit(benchmark::kMillisecond);

void BM_CholeskySample(benchmark::State& state) {
  const fbm::CholeskySampler sampler(Hurst(0.7), TimeGrid(256));
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(2, 1000, 1, mode(state)));
  label(state);
}
BENCHMARK(BM_CholeskySample)->Args({0, 0})->Args({1, 0})->Unit(benchmark::kMillisecond);

void BM_FracInner(benchmark::State& state) {
  const TimeGrid grid(static_cast<std::size_t>(state.range(1)));
  const auto phi = holder::SampledPath::from_function(grid, [](double t) { return t * t; });
  for (auto _ : state) benchmark::DoNotOptimize(frac::h_inner_frac(phi, phi, Hurst(0.7), 8.0, mode(state)));
  label(state);
}
BENCHMARK(BM_FracInner)->ArgsProduct({{0, 1}, {1024}})->Unit(benchmark::kMillisecond);

void BM_C1Matrix(benchmark::State& state) {
  const auto sys = poly::systems::heisenberg();
  const fbm::CholeskySampler sampler(Hurst(0.7), TimeGrid(static_cast<std::size_t>(state.range(1))));
  const auto driver = sampler.sample_one(2, 0, 1);
  const auto sol = sde::solve_variation(sys, sys.start(), driver);
  for (auto _ : state) benchmark::DoNotOptimize(malliavin::c1_matrix(sol, Hurst(0.7), mode(state)));
  label(state);
}
BENCHMARK(BM_C1Matrix)->ArgsProduct({{0, 1}, {1024}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
