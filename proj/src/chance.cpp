#include "tao/chance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "tao/arrivals.hpp"
#include "tao/engine.hpp"
#include "tao/errors.hpp"
#include "tao/poisson.hpp"

namespace tao {

std::string_view to_string(LoadModel mode) { return mode == LoadModel::paper ? "paper" : "busy_server"; }

LoadModel parse_load_model(std::string_view text) {
  if (text == "paper") return LoadModel::paper;
  if (text == "busy_server" || text == "busy-server") return LoadModel::busy_server;
  throw ConfigError("unknown load model '" + std::string(text) + "' (expected paper or busy-server)");
}

std::string_view to_string(Constraint constraint) {
  switch (constraint) {
    case Constraint::power: return "power";
    case Constraint::battery: return "battery";
    case Constraint::temperature: return "temperature";
    case Constraint::none: break;
  }
  return "none";
}

void ConfidencePolicy::validate() const {
  if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("omega must lie in (0, 1)");
}

namespace {

// floor(x) tolerant to x landing a hair below an integer
std::int64_t safe_floor(double x) { return static_cast<std::int64_t>(std::floor(x + 1e-9)); }

Margin cdf_margin(std::int64_t capacity, double mean, double omega) {
  const double cdf = capacity < 0 ? 0.0 : poisson_cdf(capacity, mean);
  return {cdf >= omega, cdf - omega};
}

}  // namespace

Margin power_feasible(const DeviceSpec& device, const PoissonLoad& load, const ConfidencePolicy& policy,
                      double t_s) {
  policy.validate();
  const std::int64_t capacity = safe_floor((device.tdp_watts - device.idle_power_watts) / device.request_power_watts);
  const double mean = policy.mode == LoadModel::paper ? load.counting_mean(t_s)
                                                      : load.occupancy_mean(device.request_duration_s);
  return cdf_margin(capacity, mean, policy.omega);
}

Margin battery_feasible(const DeviceSpec& device, const PoissonLoad& load, const ConfidencePolicy& policy,
                        double horizon_s) {
  policy.validate();
  if (!(horizon_s > 0.0)) throw std::invalid_argument("horizon must be > 0");
  const double available = device.battery_joules - device.idle_power_watts * horizon_s;
  const double per_request = device.request_power_watts * device.request_duration_s;
  const std::int64_t capacity = safe_floor(available / per_request);
  const Margin quantile = cdf_margin(capacity, load.counting_mean(horizon_s), policy.omega);
  if (policy.mode == LoadModel::busy_server) return quantile;
  const double expected_level =
      available - device.request_power_watts * load.rate_per_s * load.alpha * horizon_s * horizon_s / 2.0;
  return {quantile.feasible && expected_level > 0.0,
          std::min(quantile.margin, expected_level / device.battery_joules)};
}

ThermalEnsemble::ThermalEnsemble(const DeviceSpec& device, double rate_per_s, const ConfidencePolicy& policy,
                                 const ThermalSetting& setting, Exec exec) {
  if (policy.mc_runs == 0) throw std::invalid_argument("Monte Carlo run budget must be positive");
  critical_.assign(policy.mc_runs, std::numeric_limits<double>::infinity());
  const double limit = setting.temp_limit_c + kFeasibilitySlack;

  auto evaluate_run = [&](std::size_t run) {
    auto arrival_rng = make_stream(policy.mc_seed, run, stream_tag::arrivals);
    auto mark_rng = make_stream(policy.mc_seed, run, stream_tag::marks);
    const auto times = poisson_arrivals(arrival_rng, rate_per_s, setting.horizon_s);
    const std::size_t n = times.size();
    std::vector<Request> reqs(n);
    std::vector<double> marks(n);
    for (std::size_t i = 0; i < n; ++i) {
      reqs[i].device = device.id;
      reqs[i].arrival_s = times[i];
      reqs[i].duration_s = device.request_duration_s;
      reqs[i].power_watts = device.request_power_watts;
      marks[i] = uniform01(mark_rng);
    }
    std::vector<std::size_t> by_mark(n);
    std::iota(by_mark.begin(), by_mark.end(), std::size_t{0});
    std::stable_sort(by_mark.begin(), by_mark.end(), [&](std::size_t a, std::size_t b) { return marks[a] < marks[b]; });

    // include the k requests with the smallest marks
    auto violates = [&](std::size_t k) {
      std::vector<std::uint8_t> local(n, 0);
      for (std::size_t i = 0; i < k; ++i) local[by_mark[i]] = 1;
      const auto traces = device_traces(device, reqs, local, setting.horizon_s, setting.dt_s, Exec::serial);
      return traces.temperature.max() > limit;
    };
    if (violates(0))
      throw NumericError("device '" + device.id + "' exceeds the temperature limit with no local load");
    if (n == 0 || !violates(n)) return;
    std::size_t safe = 0;
    std::size_t unsafe = n;
    while (unsafe - safe > 1) {
      const std::size_t mid = safe + (unsafe - safe) / 2;
      (violates(mid) ? unsafe : safe) = mid;
    }
    critical_[run] = marks[by_mark[unsafe - 1]];
  };

  const auto runs = static_cast<std::int64_t>(policy.mc_runs);
  if (exec == Exec::parallel) {
    // exceptions may not cross the parallel region
    std::vector<std::string> errors(policy.mc_runs);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t j = 0; j < runs; ++j) {
      try {
        evaluate_run(static_cast<std::size_t>(j));
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(j)] = e.what();
      }
    }
    for (const auto& e : errors)
      if (!e.empty()) throw NumericError(e);
  } else {
    for (std::int64_t j = 0; j < runs; ++j) evaluate_run(static_cast<std::size_t>(j));
  }
}

double ThermalEnsemble::safe_fraction(double alpha) const {
  const auto safe = std::count_if(critical_.begin(), critical_.end(), [&](double c) { return alpha <= c; });
  return static_cast<double>(safe) / static_cast<double>(critical_.size());
}

Margin thermal_feasible(const DeviceSpec& device, const PoissonLoad& load, const ConfidencePolicy& policy,
                        const ThermalSetting& setting) {
  policy.validate();
  if (policy.mode == LoadModel::paper) {
    const double one_pulse =
        single_pulse_peak_rise(device.thermal, device.request_power_watts, device.request_duration_s, setting.dt_s);
    const double headroom =
        setting.temp_limit_c - device.ambient_temp_c - device.idle_power_watts * device.thermal.total_resistance();
    const std::int64_t capacity = headroom < 0.0 ? -1 : safe_floor(headroom / one_pulse);
    return cdf_margin(capacity, load.counting_mean(setting.horizon_s), policy.omega);
  }
  if (policy.mc_runs == 0) throw std::invalid_argument("Monte Carlo run budget must be positive");
  if (load.alpha <= 0.0 || load.rate_per_s <= 0.0) {
    const double headroom =
        setting.temp_limit_c - device.ambient_temp_c - device.idle_power_watts * device.thermal.total_resistance();
    return {headroom >= -kFeasibilitySlack, (headroom >= -kFeasibilitySlack ? 1.0 : 0.0) - policy.omega};
  }
  const ThermalEnsemble ensemble(device, load.rate_per_s, policy, setting);
  const double safe = ensemble.safe_fraction(load.alpha);
  return {safe >= policy.omega, safe - policy.omega};
}

double power_sufficiency(const PoissonLoad& load, double t_s, double horizon_s) {
  if (!(t_s >= 0.0) || t_s > horizon_s) throw std::invalid_argument("power_sufficiency needs 0 <= t <= horizon");
  const double mean_t = load.counting_mean(t_s);
  const double mean_horizon = load.counting_mean(horizon_s);
  const std::int64_t i_max = poisson_truncation(mean_horizon);
  const std::int64_t j_max = std::max(poisson_truncation(mean_t), i_max);
  std::vector<double> pmf_t(static_cast<std::size_t>(j_max + 1));
  for (std::int64_t j = 0; j <= j_max; ++j) pmf_t[static_cast<std::size_t>(j)] = poisson_pmf(j, mean_t);
  double total = 0.0;
  for (std::int64_t i = 0; i <= i_max; ++i) {
    double inner = 0.0;
    for (std::int64_t j = j_max; j >= i; --j) inner += pmf_t[static_cast<std::size_t>(j)];
    total += poisson_pmf(i, mean_horizon) * inner;
  }
  return total;
}

double bisect_max_feasible(const std::function<bool(double)>& feasible, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("bisection tolerance must be > 0");
  if (!feasible(0.0)) throw NumericError("constraint is violated even at alpha = 0");
  if (feasible(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

AlphaSolution solve_alpha(const DeviceSpec& device, double rate_per_s, const ConfidencePolicy& policy,
                          const ThermalSetting& setting, const SolveOptions& options) {
  policy.validate();
  AlphaSolution sol;
  sol.device = device.id;

  auto power_at = [&](double a) { return power_feasible(device, {rate_per_s, a}, policy, setting.horizon_s); };
  auto battery_at = [&](double a) { return battery_feasible(device, {rate_per_s, a}, policy, setting.horizon_s); };

  std::optional<ThermalEnsemble> ensemble;
  if (options.thermal && policy.mode == LoadModel::busy_server && rate_per_s > 0.0)
    ensemble.emplace(device, rate_per_s, policy, setting, options.exec);
  auto thermal_at = [&](double a) -> Margin {
    if (ensemble) {
      const double safe = ensemble->safe_fraction(a);
      return {safe >= policy.omega, safe - policy.omega};
    }
    return thermal_feasible(device, {rate_per_s, a}, policy, setting);
  };

  struct Candidate {
    Constraint which;
    double alpha;
  };
  std::vector<Candidate> candidates;
  auto solve_one = [&](Constraint which, const auto& margin_at) {
    try {
      candidates.push_back({which, bisect_max_feasible([&](double a) { return margin_at(a).feasible; },
                                                       options.tolerance)});
    } catch (const NumericError&) {
      throw NumericError("device '" + device.id + "': " + std::string(to_string(which)) +
                         " constraint is violated even with every request offloaded");
    }
  };
  if (options.power) solve_one(Constraint::power, power_at);
  if (options.battery) solve_one(Constraint::battery, battery_at);
  if (options.thermal) solve_one(Constraint::temperature, thermal_at);

  sol.alpha = 1.0;
  for (const auto& c : candidates) {
    if (c.alpha < sol.alpha) {
      sol.alpha = c.alpha;
      sol.binding = c.which;
    }
  }
  sol.power = power_at(sol.alpha);
  sol.battery = battery_at(sol.alpha);
  sol.thermal = thermal_at(sol.alpha);
  switch (sol.binding) {
    case Constraint::power: sol.slack_at_alpha = sol.power.margin; break;
    case Constraint::battery: sol.slack_at_alpha = sol.battery.margin; break;
    case Constraint::temperature: sol.slack_at_alpha = sol.thermal.margin; break;
    case Constraint::none: {
      double slack = 1.0;
      if (options.power) slack = std::min(slack, sol.power.margin);
      if (options.battery) slack = std::min(slack, sol.battery.margin);
      if (options.thermal) slack = std::min(slack, sol.thermal.margin);
      sol.slack_at_alpha = slack;
      break;
    }
  }
  return sol;
}

std::vector<AlphaSolution> solve_alpha(const Scenario& scenario, const ConfidencePolicy& policy,
                                       const SolveOptions& options) {
  const ThermalSetting setting{scenario.horizon_s, scenario.dt_s, scenario.temp_limit_c};
  std::vector<AlphaSolution> out;
  for (const auto& d : scenario.devices) out.push_back(solve_alpha(d, scenario.rate_for(d.id), policy, setting, options));
  return out;
}

}  // namespace tao
