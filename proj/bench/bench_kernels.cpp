// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <vector>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/error_model.hpp"
#include "nvfactor/pulse_opt.hpp"
#include "nvfactor/tomography.hpp"

using namespace nvfactor;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

adiabatic::AdiabaticProblem bell_problem(double total) {
  return adiabatic::two_qubit_factoring_problem(1.0, 1.0, adiabatic::Schedule::linear(total));
}

void BM_SpectrumScan(benchmark::State& state) {
  const auto p = bell_problem(1.0);
  std::vector<double> grid(2001);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = static_cast<double>(k) / (grid.size() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(adiabatic::spectrum_scan(p, grid, exec_of(state)));
}

void BM_ScanTotalTime(benchmark::State& state) {
  const auto p = bell_problem(1.0);
  const std::vector<double> ts{5, 10, 20, 40, 80, 160, 200, 240};
  for (auto _ : state) benchmark::DoNotOptimize(adiabatic::scan_total_time(p, ts, {}, exec_of(state)));
}

void BM_Gradient(benchmark::State& state) {
  const auto cp = pulse::nv_transfer_problem();
  const auto p = pulse::random_pulse(cp, 400, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pulse::gradient(cp, p, exec_of(state)));
}

void BM_NoisyPulseEnsemble(benchmark::State& state) {
  const auto cp = pulse::nv_transfer_problem();
  const auto p = pulse::adiabatic_pulse(cp, pulse::kDefaultSegments, 1.0);
  const noise::ErrorConfig e;
  for (auto _ : state) benchmark::DoNotOptimize(noise::noisy_pulse_ensemble(cp, p, e, exec_of(state)));
}

void BM_TomographyShots(benchmark::State& state) {
  const auto rho = DensityMatrix::pure(adiabatic::bell_target());
  for (auto _ : state) benchmark::DoNotOptimize(tomo::simulate_all(rho, 100000, 20, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_SpectrumScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanTotalTime)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoisyPulseEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TomographyShots)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
