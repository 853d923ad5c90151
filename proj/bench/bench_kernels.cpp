// Serial reference against the OpenMP kernels, plus the structured fast paths.
#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "tao/scenario_io.hpp"
#include "tao/sim.hpp"
#include "tao/thermal.hpp"

using namespace tao;

namespace {

constexpr double kDt = 0.1;
const std::vector<ThermalStage> kStages{{2.0, 15.0}, {26.0, 400.0}};

std::vector<double> kernel_samples(std::size_t n) {
  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& s : kStages) h[k] += s.r_th_c_per_w / s.theta_s * std::exp(-static_cast<double>(k) * kDt / s.theta_s);
  return h;
}

// ten 35 s pulses at 2 W over the horizon
std::vector<double> pulse_train(std::size_t n) {
  std::vector<double> p(n, 0.0);
  const std::size_t width = 350, gap = n / 10;
  for (std::size_t start = 0; start + width < n; start += gap)
    for (std::size_t k = start; k <= start + width; ++k) p[k] = 2.0;
  return p;
}

void BM_direct_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = pulse_train(n);
  const auto h = kernel_samples(n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_direct_serial(p, h, kDt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_direct_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = pulse_train(n);
  const auto h = kernel_samples(n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_direct_omp(p, h, kDt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_step_superposition(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = pulse_train(n);
  const auto h = kernel_samples(n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_step_superposition(p, h, kDt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_recursive(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = pulse_train(n);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_recursive(p, kStages, kDt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void ensemble(benchmark::State& state, Exec exec) {
  const auto cfg = load_experiment(std::filesystem::path(TAO_SOURCE_DIR) / "scenarios" / "replication.scenario");
  Strategy sota;
  sota.kind = StrategyKind::sota;
  const auto runs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(cfg.scenario, sota, runs, 1, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(runs));
}

void BM_ensemble_serial(benchmark::State& state) { ensemble(state, Exec::serial); }
void BM_ensemble_parallel(benchmark::State& state) { ensemble(state, Exec::parallel); }

}  // namespace

BENCHMARK(BM_direct_serial)->Arg(6001)->Arg(12001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_direct_omp)->Arg(6001)->Arg(12001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_step_superposition)->Arg(6001)->Arg(12001)->Arg(36001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_recursive)->Arg(6001)->Arg(12001)->Arg(36001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_serial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_parallel)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
