#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tao/engine.hpp"
#include "tao/exec.hpp"
#include "tao/scenario.hpp"

namespace tao {

enum class StrategyKind { tao, sota, always_offload, always_local, oracle };

std::string_view to_string(StrategyKind kind);
/// Accepts the names above, with '-' or '_'. Throws ConfigError otherwise.
StrategyKind parse_strategy(std::string_view text);

struct Strategy {
  StrategyKind kind = StrategyKind::always_offload;
  /// Local-service probability per device id (tao only).
  std::map<std::string, double> alpha;
  /// tao only: offload whenever local service would push power above TDP.
  bool guard = false;
  /// Mixed into the per-run seed for the tao coin flips.
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError on alpha outside [0, 1] or missing for a device.
  void validate(const Scenario& scenario) const;
};

struct DeviceMetrics {
  std::string device;
  double max_temp_c = 0.0;
  double temp_violation_fraction = 0.0;  // grid samples with tau > limit
  double final_battery_j = 0.0;
  double max_power_w = 0.0;
  int n_local = 0;
  int n_offloaded = 0;
  double total_cost = 0.0;
  bool power_violated = false;
  bool battery_violated = false;
  bool temp_violated = false;
};

struct DeviceRun {
  DeviceTraces traces;
  TimeSeries cumulative_cost;
  DeviceMetrics metrics;
};

struct RunResult {
  std::vector<Request> requests;
  DecisionVector decisions;
  std::vector<DeviceRun> devices;

  const DeviceRun& device(const std::string& id) const;
  int n_local() const;
  double total_cost() const;
  /// Violating samples over all samples, pooled across devices.
  double temp_violation_fraction() const;
  bool any_temp_violation() const;
};

/// Poisson arrivals per device (stream = device index), durations and powers
/// from the device defaults. Explicit lists are returned unchanged.
std::vector<Request> generate_requests(const Scenario& scenario, std::uint64_t seed);

/// Same scenario with the request source replaced by generate_requests(seed).
Scenario realize(const Scenario& scenario, std::uint64_t seed);

/// Decisions in arrival order followed by trace and metric computation.
/// Deterministic in (scenario, strategy, seed).
RunResult run(const Scenario& scenario, const Strategy& strategy, std::uint64_t seed,
              Exec exec = Exec::parallel);

struct RunSummary {
  std::uint64_t seed = 0;
  std::vector<DeviceMetrics> devices;
  int n_requests = 0;
  int n_local = 0;
  double total_cost = 0.0;
  double max_temp_c = 0.0;
  double temp_violation_fraction = 0.0;
  bool temp_violated = false;
  bool any_violation = false;  // temperature, power, or battery
  double min_final_battery_j = 0.0;
};

RunSummary summarize(const RunResult& result, std::uint64_t seed);

struct EnsembleSummary {
  std::vector<RunSummary> runs;
  double mean_max_temp_c = 0.0;
  double max_max_temp_c = 0.0;
  double temp_violation_run_fraction = 0.0;
  double any_violation_run_fraction = 0.0;
  double mean_temp_violation_fraction = 0.0;
  double mean_total_cost = 0.0;
  double mean_final_battery_j = 0.0;
  double mean_n_local = 0.0;
};

/// Runs seeds base_seed + i for i < n_runs; aggregation is in index order.
EnsembleSummary monte_carlo(const Scenario& scenario, const Strategy& strategy, std::size_t n_runs,
                            std::uint64_t base_seed, Exec exec = Exec::parallel);

struct Histogram {
  double lo_c = 0.0;
  double hi_c = 0.0;
  std::vector<double> mass;  // normalized, sums to 1
  double exceedance = 0.0;   // fraction of samples above the limit

  double bin_width() const { return mass.empty() ? 0.0 : (hi_c - lo_c) / static_cast<double>(mass.size()); }
};

/// Normalized histogram of one device's temperature samples over
/// [ambient, max observed]. Throws std::invalid_argument on an empty trace or n_bins == 0.
Histogram empirical_temperature_distribution(const RunResult& result, const std::string& device,
                                             std::size_t n_bins, double ambient_c, double temp_limit_c);

/// Writes `<dir>/<prefix><device>.csv` with columns time_s,power_w,temp_c,battery_j,cost,
/// keeping every `stride`-th sample.
std::vector<std::filesystem::path> write_run_csvs(const std::filesystem::path& dir, const RunResult& result,
                                                  std::size_t stride, const std::string& prefix = "");

/// One row per run: seed,n_requests,n_local,total_cost,max_temp_c,temp_violation_fraction,
/// temp_violated,any_violation,min_final_battery_j.
void write_ensemble_csv(const std::filesystem::path& path, const EnsembleSummary& summary);

}  // namespace tao
