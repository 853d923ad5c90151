#include "tao/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "tao/errors.hpp"
#include "tao/thermal.hpp"

namespace tao {

PulseSpan snap_pulse(double arrival_s, double duration_s, double dt_s, std::size_t n_samples) {
  return {nearest_index(arrival_s, dt_s, n_samples), nearest_index(arrival_s + duration_s, dt_s, n_samples)};
}

std::vector<double> power_samples(std::span<const Request> requests, std::span<const std::uint8_t> local,
                                  std::size_t n_samples, double dt_s, double idle_watts) {
  if (local.size() != requests.size()) throw std::invalid_argument("one local flag per request required");
  std::vector<double> p(n_samples, idle_watts);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!local[i]) continue;
    const auto span = snap_pulse(requests[i].arrival_s, requests[i].duration_s, dt_s, n_samples);
    for (std::size_t n = span.first; n <= span.last; ++n) p[n] += requests[i].power_watts;
  }
  return p;
}

namespace {

std::vector<std::uint8_t> local_flags(std::span<const Request> requests, const DecisionVector& decisions) {
  std::vector<std::uint8_t> flags(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!decisions.contains(requests[i].id))
      throw std::invalid_argument("decision vector has no entry for request '" + requests[i].id + "'");
    flags[i] = decisions.local(requests[i].id) ? 1 : 0;
  }
  return flags;
}

}  // namespace

TimeSeries build_power_trace(const Scenario& scenario, const std::string& device, const DecisionVector& decisions) {
  const auto& spec = scenario.device(device);
  decisions.require_covers(scenario.request_list());
  const auto reqs = scenario.requests_for(device);
  const auto flags = local_flags(reqs, decisions);
  return {0.0, scenario.dt_s, power_samples(reqs, flags, scenario.grid_points(), scenario.dt_s, spec.idle_power_watts)};
}

TimeSeries integrate_battery(const TimeSeries& power, double initial_joules) {
  if (!(initial_joules > 0.0)) throw std::invalid_argument("initial battery must be > 0");
  TimeSeries b{power.t0_s, power.dt_s, std::vector<double>(power.size())};
  if (power.empty()) return b;
  b.samples[0] = initial_joules;
  const double half_dt = 0.5 * power.dt_s;
  for (std::size_t n = 1; n < power.size(); ++n)
    b.samples[n] = b.samples[n - 1] - half_dt * (power.samples[n - 1] + power.samples[n]);
  return b;
}

double request_energy(const Request& request, double dt_s, std::size_t n_samples) {
  const auto span = snap_pulse(request.arrival_s, request.duration_s, dt_s, n_samples);
  double steps = static_cast<double>(span.last - span.first);
  if (span.first > 0) steps += 0.5;
  if (span.last + 1 < n_samples) steps += 0.5;
  return request.power_watts * dt_s * steps;
}

DeviceTraces device_traces(const DeviceSpec& device, std::span<const Request> requests,
                           std::span<const std::uint8_t> local, double horizon_s, double dt_s, Exec exec) {
  const std::size_t n = grid_size(horizon_s, dt_s);
  DeviceTraces t;
  t.power = {0.0, dt_s, power_samples(requests, local, n, dt_s, device.idle_power_watts)};
  const bool same_dt = device.thermal.is_parametric() ||
                       std::abs(device.thermal.table_dt_s() - dt_s) <= 1e-9 * dt_s;
  t.temperature = same_dt ? convolve_temperature(t.power, device.thermal, device.ambient_temp_c, exec)
                          : convolve_temperature(t.power, tabulate(device.thermal, dt_s), device.ambient_temp_c, exec);
  t.battery = integrate_battery(t.power, device.battery_joules);
  return t;
}

DeviceTraces device_traces(const Scenario& scenario, const std::string& device, const DecisionVector& decisions,
                           Exec exec) {
  decisions.require_covers(scenario.request_list());
  const auto reqs = scenario.requests_for(device);
  const auto flags = local_flags(reqs, decisions);
  return device_traces(scenario.device(device), reqs, flags, scenario.horizon_s, scenario.dt_s, exec);
}

namespace {

template <typename Pred>
std::optional<double> first_time(const TimeSeries& s, Pred pred) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (pred(s.samples[i])) return s.time(i);
  return std::nullopt;
}

}  // namespace

DeviceFeasibility check_device(const DeviceSpec& device, const DeviceTraces& traces, double temp_limit_c) {
  DeviceFeasibility f;
  f.device = device.id;

  f.power.limit = device.tdp_watts;
  f.power.worst = traces.power.max();
  f.power.violated = f.power.worst > device.tdp_watts + kFeasibilitySlack;
  if (f.power.violated)
    f.power.first_violation_s = first_time(traces.power, [&](double p) { return p > device.tdp_watts + kFeasibilitySlack; });

  f.battery.limit = 0.0;
  f.battery.worst = traces.battery.back();
  f.battery.violated = f.battery.worst < -kFeasibilitySlack;
  if (f.battery.violated) f.battery.first_violation_s = first_time(traces.battery, [](double b) { return b < -kFeasibilitySlack; });

  f.temperature.limit = temp_limit_c;
  f.temperature.worst = traces.temperature.max();
  f.temperature.violated = f.temperature.worst > temp_limit_c + kFeasibilitySlack;
  if (f.temperature.violated)
    f.temperature.first_violation_s =
        first_time(traces.temperature, [&](double c) { return c > temp_limit_c + kFeasibilitySlack; });
  return f;
}

bool FeasibilityReport::feasible() const {
  return std::all_of(devices.begin(), devices.end(), [](const DeviceFeasibility& d) { return d.feasible(); });
}

FeasibilityReport check_feasibility(const Scenario& scenario, const DecisionVector& decisions) {
  decisions.require_covers(scenario.request_list());
  FeasibilityReport report;
  for (const auto& d : scenario.devices)
    report.devices.push_back(check_device(d, device_traces(scenario, d.id, decisions), scenario.temp_limit_c));
  return report;
}

namespace {

bool mask_feasible(const DeviceSpec& device, std::span<const Request> reqs, std::uint64_t mask, const Scenario& s) {
  const std::size_t n = reqs.size();
  std::vector<std::uint8_t> flags(n);
  for (std::size_t i = 0; i < n; ++i) flags[i] = (mask >> (n - 1 - i)) & 1u;
  const auto traces = device_traces(device, reqs, flags, s.horizon_s, s.dt_s, Exec::serial);
  return check_device(device, traces, s.temp_limit_c).feasible();
}

}  // namespace

OracleResult oracle_optimize(const Scenario& scenario, Exec exec) {
  const auto& all = scenario.request_list();
  if (all.size() > kOracleMaxRequests)
    throw ConfigError("oracle limited to " + std::to_string(kOracleMaxRequests) + " requests, scenario has " +
                      std::to_string(all.size()));
  OracleResult result;
  for (const auto& device : scenario.devices) {
    const auto reqs = scenario.requests_for(device.id);
    const std::size_t n = reqs.size();
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<std::uint8_t> feasible(count, 0);
    if (exec == Exec::parallel) {
      const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 8)
      for (std::int64_t m = 0; m < total; ++m)
        feasible[static_cast<std::size_t>(m)] = mask_feasible(device, reqs, static_cast<std::uint64_t>(m), scenario);
    } else {
      for (std::uint64_t m = 0; m < count; ++m) feasible[m] = mask_feasible(device, reqs, m, scenario);
    }
    if (!feasible[0])
      throw NumericError("device '" + device.id + "' is infeasible even with every request offloaded");
    std::uint64_t best = 0;
    int best_count = 0;
    for (std::uint64_t m = 1; m < count; ++m) {
      const int c = std::popcount(m);
      if (feasible[m] && c > best_count) {
        best = m;
        best_count = c;
      }
    }
    for (std::size_t i = 0; i < n; ++i) result.decisions.set(reqs[i].id, ((best >> (n - 1 - i)) & 1u) != 0);
    result.objective += best_count;
  }
  return result;
}

}  // namespace tao
