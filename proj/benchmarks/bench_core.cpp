#include <benchmark/benchmark.h>

#include "radpair/control.hpp"
#include "radpair/qfi.hpp"
#include "radpair/yields.hpp"

using namespace radpair;

static void BM_generator(benchmark::State& state) {
  HamiltonianSpec s = ellipsoidal(1.3, 0.4, 0.7, 0.9);
  if (state.range(0) > 1) s.acceptor_tensors.push_back(HyperfineTensor::isotropic(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(generator(s, 2.0).F_max);
}
BENCHMARK(BM_generator)->Arg(1)->Arg(2);

static void BM_laplace_average(benchmark::State& state) {
  const EvolutionCache cache(isotropic(100.0, 1.0), mixed_singlet(SpinSystem(1, 0)));
  for (auto _ : state) benchmark::DoNotOptimize(laplace_average_singlet(cache, 1.0));
}
BENCHMARK(BM_laplace_average);

static void BM_second_moment(benchmark::State& state) {
  const EvolutionCache cache(isotropic(100.0, 1.0), mixed_singlet(SpinSystem(1, 0)));
  for (auto _ : state) benchmark::DoNotOptimize(laplace_second_moment_singlet(cache, 1.0));
}
BENCHMARK(BM_second_moment);

static void BM_integrated_deltaB(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        deltaB_for(Variant::isotropic, InitialState::mixed, SensitivityMode::integrated, 1000, 1.15, 1));
}
BENCHMARK(BM_integrated_deltaB)->Unit(benchmark::kMicrosecond);

static void BM_instantaneous_deltaB(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        deltaB_for(Variant::max_anisotropic, InitialState::mixed, SensitivityMode::instantaneous, 100, 1, 1));
}
BENCHMARK(BM_instantaneous_deltaB)->Unit(benchmark::kMillisecond);

static void BM_simulate_control(benchmark::State& state) {
  ControlConfig c;
  c.B = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_control(c).deltaB_over_deltaBF);
}
BENCHMARK(BM_simulate_control)->Arg(7)->Arg(18)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
