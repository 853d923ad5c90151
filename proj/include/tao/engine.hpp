#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tao/exec.hpp"
#include "tao/scenario.hpp"
#include "tao/time_series.hpp"

namespace tao {

/// Inclusive grid-index range covered by a request pulse after snapping
/// both edges to the nearest grid point.
struct PulseSpan {
  std::size_t first = 0;
  std::size_t last = 0;
};

PulseSpan snap_pulse(double arrival_s, double duration_s, double dt_s, std::size_t n_samples);

/// Power samples: idle + sum of pi(r) over local requests whose snapped
/// pulse covers the sample (closed interval).
std::vector<double> power_samples(std::span<const Request> requests, std::span<const std::uint8_t> local,
                                  std::size_t n_samples, double dt_s, double idle_watts);

TimeSeries build_power_trace(const Scenario& scenario, const std::string& device,
                             const DecisionVector& decisions);

/// b[0] = initial, b[n] = initial - trapezoidal integral of power over [0, t_n].
TimeSeries integrate_battery(const TimeSeries& power, double initial_joules);

/// Energy a single locally served request removes from the battery under the
/// trapezoidal rule applied to its sampled pulse.
double request_energy(const Request& request, double dt_s, std::size_t n_samples);

struct DeviceTraces {
  TimeSeries power;
  TimeSeries temperature;
  TimeSeries battery;
};

DeviceTraces device_traces(const DeviceSpec& device, std::span<const Request> requests,
                           std::span<const std::uint8_t> local, double horizon_s, double dt_s,
                           Exec exec = Exec::parallel);

DeviceTraces device_traces(const Scenario& scenario, const std::string& device,
                           const DecisionVector& decisions, Exec exec = Exec::parallel);

struct ConstraintCheck {
  bool violated = false;
  double worst = 0.0;  // max power, final battery, or max temperature
  double limit = 0.0;
  std::optional<double> first_violation_s;
};

struct DeviceFeasibility {
  std::string device;
  ConstraintCheck power;
  ConstraintCheck battery;
  ConstraintCheck temperature;

  bool feasible() const { return !power.violated && !battery.violated && !temperature.violated; }
};

struct FeasibilityReport {
  std::vector<DeviceFeasibility> devices;

  bool feasible() const;
};

DeviceFeasibility check_device(const DeviceSpec& device, const DeviceTraces& traces, double temp_limit_c);

FeasibilityReport check_feasibility(const Scenario& scenario, const DecisionVector& decisions);

inline constexpr std::size_t kOracleMaxRequests = 20;

struct OracleResult {
  DecisionVector decisions;
  int objective = 0;
};

/**
 * Exhaustive search for the feasible decision vector with the most local
 * requests. Ties go to the lexicographically smallest vector with requests
 * in arrival order (0 before 1). Constraints are per device, so each device
 * is enumerated independently; the combination of per-device lexicographic
 * minima is the global lexicographic minimum.
 *
 * Throws ConfigError above kOracleMaxRequests and NumericError when even
 * the all-offload vector is infeasible.
 */
OracleResult oracle_optimize(const Scenario& scenario, Exec exec = Exec::parallel);

}  // namespace tao
