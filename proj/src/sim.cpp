#include "tao/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tao/arrivals.hpp"
#include "tao/csv.hpp"
#include "tao/errors.hpp"

namespace tao {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::tao: return "tao";
    case StrategyKind::sota: return "sota";
    case StrategyKind::always_offload: return "always_offload";
    case StrategyKind::always_local: return "always_local";
    case StrategyKind::oracle: return "oracle";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view text) {
  std::string name(text);
  std::replace(name.begin(), name.end(), '-', '_');
  for (auto kind : {StrategyKind::tao, StrategyKind::sota, StrategyKind::always_offload, StrategyKind::always_local,
                    StrategyKind::oracle})
    if (name == to_string(kind)) return kind;
  throw ConfigError("unknown strategy '" + std::string(text) +
                    "' (expected tao, sota, always-offload, always-local, oracle)");
}

void Strategy::validate(const Scenario& scenario) const {
  if (kind != StrategyKind::tao) return;
  for (const auto& d : scenario.devices) {
    const auto it = alpha.find(d.id);
    if (it == alpha.end()) throw ConfigError("tao strategy has no alpha for device '" + d.id + "'");
    if (!(it->second >= 0.0 && it->second <= 1.0))
      throw ConfigError("tao alpha for device '" + d.id + "' must lie in [0, 1]");
  }
}

const DeviceRun& RunResult::device(const std::string& id) const {
  for (const auto& d : devices)
    if (d.metrics.device == id) return d;
  throw std::invalid_argument("run has no device '" + id + "'");
}

int RunResult::n_local() const {
  int n = 0;
  for (const auto& d : devices) n += d.metrics.n_local;
  return n;
}

double RunResult::total_cost() const {
  double c = 0.0;
  for (const auto& d : devices) c += d.metrics.total_cost;
  return c;
}

double RunResult::temp_violation_fraction() const {
  double violating = 0.0;
  double total = 0.0;
  for (const auto& d : devices) {
    const auto n = static_cast<double>(d.traces.temperature.size());
    violating += d.metrics.temp_violation_fraction * n;
    total += n;
  }
  return total > 0.0 ? violating / total : 0.0;
}

bool RunResult::any_temp_violation() const {
  return std::any_of(devices.begin(), devices.end(), [](const DeviceRun& d) { return d.metrics.temp_violated; });
}

std::vector<Request> generate_requests(const Scenario& scenario, std::uint64_t seed) {
  if (scenario.has_explicit_requests()) return scenario.request_list();
  std::vector<Request> out;
  for (std::size_t di = 0; di < scenario.devices.size(); ++di) {
    const auto& d = scenario.devices[di];
    auto rng = make_stream(seed, di, stream_tag::arrivals);
    const auto times = poisson_arrivals(rng, scenario.rate_for(d.id), scenario.horizon_s);
    for (std::size_t k = 0; k < times.size(); ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "#%05zu", k);
      out.push_back({d.id + id, d.id, times[k], d.request_duration_s, d.request_power_watts});
    }
  }
  sort_by_arrival(out);
  return out;
}

Scenario realize(const Scenario& scenario, std::uint64_t seed) {
  Scenario s = scenario;
  s.requests = generate_requests(scenario, seed);
  return s;
}

namespace {

// Online bookkeeping shared by sota and the tao guard.
class LoadTracker {
 public:
  LoadTracker(const DeviceSpec& device, std::size_t n, double dt)
      : device_(device), dt_(dt), power_(n, device.idle_power_watts),
        committed_j_(device.idle_power_watts * dt * static_cast<double>(n - 1)) {}

  bool power_fits(const Request& r) const {
    const auto span = snap_pulse(r.arrival_s, r.duration_s, dt_, power_.size());
    const double peak = *std::max_element(power_.begin() + static_cast<std::ptrdiff_t>(span.first),
                                          power_.begin() + static_cast<std::ptrdiff_t>(span.last + 1));
    return peak + r.power_watts <= device_.tdp_watts + kFeasibilitySlack;
  }

  bool battery_fits(const Request& r) const {
    return device_.battery_joules - committed_j_ - request_energy(r, dt_, power_.size()) >= -kFeasibilitySlack;
  }

  void accept(const Request& r) {
    const auto span = snap_pulse(r.arrival_s, r.duration_s, dt_, power_.size());
    for (std::size_t n = span.first; n <= span.last; ++n) power_[n] += r.power_watts;
    committed_j_ += request_energy(r, dt_, power_.size());
  }

 private:
  const DeviceSpec& device_;
  double dt_;
  std::vector<double> power_;
  double committed_j_;
};

std::uint64_t coin_seed(std::uint64_t seed, std::uint64_t strategy_seed) {
  return seed + strategy_seed * 0x9E3779B97F4A7C15ull;
}

}  // namespace

RunResult run(const Scenario& scenario, const Strategy& strategy, std::uint64_t seed, Exec exec) {
  strategy.validate(scenario);
  const Scenario realized = realize(scenario, seed);
  const std::size_t n = realized.grid_points();
  RunResult result;
  result.requests = realized.request_list();

  if (strategy.kind == StrategyKind::oracle) {
    result.decisions = oracle_optimize(realized, exec).decisions;
  } else {
    for (std::size_t di = 0; di < realized.devices.size(); ++di) {
      const auto& device = realized.devices[di];
      LoadTracker tracker(device, n, realized.dt_s);
      auto coins = make_stream(coin_seed(seed, strategy.rng_seed), di, stream_tag::coins);
      for (const auto& r : realized.requests_for(device.id)) {
        bool local = false;
        switch (strategy.kind) {
          case StrategyKind::always_local: local = true; break;
          case StrategyKind::always_offload: local = false; break;
          case StrategyKind::sota: local = tracker.power_fits(r) && tracker.battery_fits(r); break;
          case StrategyKind::tao: {
            local = uniform01(coins) < strategy.alpha.at(device.id);
            if (local && strategy.guard) local = tracker.power_fits(r);
            break;
          }
          case StrategyKind::oracle: break;
        }
        if (local) tracker.accept(r);
        result.decisions.set(r.id, local);
      }
    }
  }

  for (const auto& device : realized.devices) {
    DeviceRun dr;
    dr.traces = device_traces(realized, device.id, result.decisions, exec);
    const auto check = check_device(device, dr.traces, realized.temp_limit_c);
    auto& m = dr.metrics;
    m.device = device.id;
    m.max_temp_c = dr.traces.temperature.max();
    m.max_power_w = dr.traces.power.max();
    m.final_battery_j = dr.traces.battery.back();
    m.power_violated = check.power.violated;
    m.battery_violated = check.battery.violated;
    m.temp_violated = check.temperature.violated;
    const double limit = realized.temp_limit_c + kFeasibilitySlack;
    const auto hot = std::count_if(dr.traces.temperature.samples.begin(), dr.traces.temperature.samples.end(),
                                   [&](double c) { return c > limit; });
    m.temp_violation_fraction = static_cast<double>(hot) / static_cast<double>(n);

    std::vector<double> cost_steps(n, 0.0);
    for (const auto& r : realized.requests_for(device.id)) {
      if (result.decisions.local(r.id)) {
        ++m.n_local;
      } else {
        ++m.n_offloaded;
        cost_steps[nearest_index(r.arrival_s, realized.dt_s, n)] += 1.0;
      }
    }
    dr.cumulative_cost = {0.0, realized.dt_s, std::vector<double>(n)};
    double offloaded = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      offloaded += cost_steps[i];
      dr.cumulative_cost.samples[i] = realized.offload_unit_cost * offloaded;
    }
    m.total_cost = realized.offload_unit_cost * m.n_offloaded;
    result.devices.push_back(std::move(dr));
  }
  return result;
}

RunSummary summarize(const RunResult& result, std::uint64_t seed) {
  RunSummary s;
  s.seed = seed;
  s.n_requests = static_cast<int>(result.requests.size());
  s.min_final_battery_j = result.devices.empty() ? 0.0 : result.devices.front().metrics.final_battery_j;
  for (const auto& d : result.devices) {
    const auto& m = d.metrics;
    s.devices.push_back(m);
    s.n_local += m.n_local;
    s.total_cost += m.total_cost;
    s.max_temp_c = std::max(s.max_temp_c, m.max_temp_c);
    s.temp_violated = s.temp_violated || m.temp_violated;
    s.any_violation = s.any_violation || m.temp_violated || m.power_violated || m.battery_violated;
    s.min_final_battery_j = std::min(s.min_final_battery_j, m.final_battery_j);
  }
  s.temp_violation_fraction = result.temp_violation_fraction();
  return s;
}

EnsembleSummary monte_carlo(const Scenario& scenario, const Strategy& strategy, std::size_t n_runs,
                            std::uint64_t base_seed, Exec exec) {
  if (n_runs == 0) throw std::invalid_argument("monte_carlo needs at least one run");
  EnsembleSummary out;
  out.runs.resize(n_runs);
  auto one = [&](std::size_t i) {
    const std::uint64_t seed = base_seed + i;
    out.runs[i] = summarize(run(scenario, strategy, seed, Exec::serial), seed);
  };
  if (exec == Exec::parallel) {
    std::vector<std::string> errors(n_runs);
    const auto total = static_cast<std::int64_t>(n_runs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < total; ++i) {
      try {
        one(static_cast<std::size_t>(i));
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
    for (const auto& e : errors)
      if (!e.empty()) throw NumericError(e);
  } else {
    for (std::size_t i = 0; i < n_runs; ++i) one(i);
  }

  const auto count = static_cast<double>(n_runs);
  out.max_max_temp_c = out.runs.front().max_temp_c;
  for (const auto& r : out.runs) {
    out.mean_max_temp_c += r.max_temp_c;
    out.max_max_temp_c = std::max(out.max_max_temp_c, r.max_temp_c);
    out.temp_violation_run_fraction += r.temp_violated ? 1.0 : 0.0;
    out.any_violation_run_fraction += r.any_violation ? 1.0 : 0.0;
    out.mean_temp_violation_fraction += r.temp_violation_fraction;
    out.mean_total_cost += r.total_cost;
    out.mean_final_battery_j += r.min_final_battery_j;
    out.mean_n_local += r.n_local;
  }
  out.mean_max_temp_c /= count;
  out.temp_violation_run_fraction /= count;
  out.any_violation_run_fraction /= count;
  out.mean_temp_violation_fraction /= count;
  out.mean_total_cost /= count;
  out.mean_final_battery_j /= count;
  out.mean_n_local /= count;
  return out;
}

Histogram empirical_temperature_distribution(const RunResult& result, const std::string& device,
                                             std::size_t n_bins, double ambient_c, double temp_limit_c) {
  if (n_bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  const auto& temps = result.device(device).traces.temperature.samples;
  if (temps.empty()) throw std::invalid_argument("temperature trace is empty");
  Histogram h;
  h.lo_c = ambient_c;
  h.hi_c = std::max(ambient_c, *std::max_element(temps.begin(), temps.end()));
  h.mass.assign(n_bins, 0.0);
  const double width = (h.hi_c - h.lo_c) / static_cast<double>(n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  std::size_t above = 0;
  for (double c : temps) {
    std::size_t bin = 0;
    if (width > 0.0) {
      const double pos = std::floor((c - h.lo_c) / width);
      bin = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), n_bins - 1);
    }
    ++counts[bin];
    if (c > temp_limit_c + kFeasibilitySlack) ++above;
  }
  const auto total = static_cast<double>(temps.size());
  for (std::size_t b = 0; b < n_bins; ++b) h.mass[b] = static_cast<double>(counts[b]) / total;
  h.exceedance = static_cast<double>(above) / total;
  return h;
}

std::vector<std::filesystem::path> write_run_csvs(const std::filesystem::path& dir, const RunResult& result,
                                                  std::size_t stride, const std::string& prefix) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& d : result.devices) {
    const auto power = d.traces.power.downsample(stride);
    CsvTable table;
    table.header = {"time_s", "power_w", "temp_c", "battery_j", "cost"};
    std::vector<double> time(power.size());
    for (std::size_t i = 0; i < time.size(); ++i) time[i] = power.time(i);
    table.columns = {time, power.samples, d.traces.temperature.downsample(stride).samples,
                     d.traces.battery.downsample(stride).samples, d.cumulative_cost.downsample(stride).samples};
    const auto path = dir / (prefix + d.metrics.device + ".csv");
    write_csv(path, table);
    written.push_back(path);
  }
  return written;
}

void write_ensemble_csv(const std::filesystem::path& path, const EnsembleSummary& summary) {
  CsvTable table;
  table.header = {"seed", "n_requests", "n_local", "total_cost", "max_temp_c", "temp_violation_fraction",
                  "temp_violated", "any_violation", "min_final_battery_j"};
  table.columns.assign(table.header.size(), {});
  for (const auto& r : summary.runs) {
    const double row[] = {static_cast<double>(r.seed), static_cast<double>(r.n_requests),
                          static_cast<double>(r.n_local), r.total_cost, r.max_temp_c, r.temp_violation_fraction,
                          r.temp_violated ? 1.0 : 0.0, r.any_violation ? 1.0 : 0.0, r.min_final_battery_j};
    for (std::size_t c = 0; c < table.columns.size(); ++c) table.columns[c].push_back(row[c]);
  }
  write_csv(path, table);
}

}  // namespace tao
