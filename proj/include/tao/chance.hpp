#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tao/exec.hpp"
#include "tao/scenario.hpp"

namespace tao {

/// How the closed forms model the number of requests contributing load.
/// paper: cumulative count N(t) ~ Poisson(lambda alpha t).
/// busy_server: requests in service ~ Poisson(lambda alpha delta); energy from N(T).
enum class LoadModel { paper, busy_server };

std::string_view to_string(LoadModel mode);
/// Accepts "paper", "busy_server" and "busy-server". Throws ConfigError otherwise.
LoadModel parse_load_model(std::string_view text);

struct ConfidencePolicy {
  double omega = 0.95;
  LoadModel mode = LoadModel::busy_server;
  std::size_t mc_runs = 1000;
  std::uint64_t mc_seed = 1;

  /// Throws std::invalid_argument unless 0 < omega < 1.
  void validate() const;
};

struct PoissonLoad {
  double rate_per_s = 0.0;
  double alpha = 0.0;

  double counting_mean(double t_s) const { return rate_per_s * alpha * t_s; }
  double occupancy_mean(double duration_s) const { return rate_per_s * alpha * duration_s; }
};

/// Result of one chance constraint: margin is P(safe) - omega unless noted.
struct Margin {
  bool feasible = true;
  double margin = 0.0;
};

/// Grid and limit the thermal chance constraint is evaluated on.
struct ThermalSetting {
  double horizon_s = 3600.0;
  double dt_s = 0.1;
  double temp_limit_c = 43.0;
};

/// P(pi N <= P^max) >= omega, N at t_s (paper) or in service (busy_server).
Margin power_feasible(const DeviceSpec& device, const PoissonLoad& load, const ConfidencePolicy& policy,
                      double t_s);

/// paper: expected level b0 - pi lambda alpha T^2/2 stays positive and the
/// omega-quantile of N(T) fits in floor(b0 / (pi delta)); margin is the
/// smaller of cdf - omega and the expected level over b0.
/// busy_server: omega-quantile of N(T) fits in floor((b0 - idle T) / (pi delta)).
Margin battery_feasible(const DeviceSpec& device, const PoissonLoad& load, const ConfidencePolicy& policy,
                        double horizon_s);

/**
 * Seeded request streams for the busy-server thermal constraint.
 *
 * Run j draws Poisson(rate) arrivals over the horizon, each with a uniform
 * mark u; at local-service probability alpha the requests with u < alpha are
 * served locally. Adding requests never cools the device, so each run has a
 * critical alpha (the mark of the request whose inclusion first breaks the
 * temperature limit) and the run is safe iff alpha <= critical.
 */
class ThermalEnsemble {
 public:
  ThermalEnsemble(const DeviceSpec& device, double rate_per_s, const ConfidencePolicy& policy,
                  const ThermalSetting& setting, Exec exec = Exec::parallel);

  /// Fraction of runs whose maximum temperature stays within the limit.
  double safe_fraction(double alpha) const;
  const std::vector<double>& critical_alphas() const { return critical_; }

 private:
  std::vector<double> critical_;
};

/// paper: P(N(T) <= floor((limit - ambient) / single-pulse peak rise)) >= omega.
/// busy_server: Monte Carlo over policy.mc_runs streams (ThermalEnsemble).
/// Throws std::invalid_argument in busy_server mode when mc_runs == 0.
Margin thermal_feasible(const DeviceSpec& device, const PoissonLoad& load, const ConfidencePolicy& policy,
                        const ThermalSetting& setting);

/// sum_i sum_{j>=i} P(N(t)=j) P(N(T)=i) with the two counts independent,
/// truncated at poisson_truncation of each mean.
double power_sufficiency(const PoissonLoad& load, double t_s, double horizon_s);

enum class Constraint { none, power, battery, temperature };
std::string_view to_string(Constraint constraint);

struct AlphaSolution {
  std::string device;
  double alpha = 0.0;
  Constraint binding = Constraint::none;
  double slack_at_alpha = 0.0;  // margin of the binding constraint at alpha
  Margin power;
  Margin battery;
  Margin thermal;
};

struct SolveOptions {
  bool power = true;
  bool battery = true;
  bool thermal = true;
  double tolerance = 1e-6;
  Exec exec = Exec::parallel;
};

/// Largest alpha in [0, 1] with feasible(alpha) for a predicate that is
/// monotone (feasible at 0, once infeasible stays infeasible). Bisection to
/// absolute tolerance; the returned point is always feasible.
double bisect_max_feasible(const std::function<bool(double)>& feasible, double tolerance);

/// Maximal stationary local-service probability for one device. Each enabled
/// constraint is solved on its own; alpha* is the smallest of those and the
/// binding constraint is the one attaining it (none when alpha* = 1).
/// Throws NumericError if a constraint fails at alpha = 0.
AlphaSolution solve_alpha(const DeviceSpec& device, double rate_per_s, const ConfidencePolicy& policy,
                          const ThermalSetting& setting, const SolveOptions& options = {});

/// Per-device solutions using Scenario::rate_for.
std::vector<AlphaSolution> solve_alpha(const Scenario& scenario, const ConfidencePolicy& policy,
                                       const SolveOptions& options = {});

}  // namespace tao
