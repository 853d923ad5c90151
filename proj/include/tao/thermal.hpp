#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "tao/exec.hpp"
#include "tao/time_series.hpp"

namespace tao {

/// One first-order thermal stage: impulse response (R/theta) * exp(-t/theta).
struct ThermalStage {
  double r_th_c_per_w = 0.0;
  double theta_s = 0.0;
};

/**
 * Thermal LTI kernel h(t) mapping power (W) to temperature rise (degC).
 *
 * Units of h are degC/J, so that dt * sum p[k] h[n-k] is a temperature.
 * A kernel is either parametric (a sum of first-order stages, defined for
 * all t >= 0) or tabulated on a uniform grid starting at t = 0 and treated
 * as zero past its last sample.
 */
class ImpulseResponse {
 public:
  /// Throws std::invalid_argument on empty stages, non-positive R or theta,
  /// or a truncation horizon shorter than 5 * max(theta).
  static ImpulseResponse parametric(std::vector<ThermalStage> stages, double truncation_horizon_s);

  /// Throws std::invalid_argument on non-positive dt, empty or negative
  /// samples, or a tail that has not decayed to 1% of the peak.
  static ImpulseResponse tabulated(double dt_s, std::vector<double> samples_c_per_j);

  bool is_parametric() const { return parametric_; }
  std::span<const ThermalStage> stages() const { return stages_; }
  double table_dt_s() const { return dt_s_; }
  std::span<const double> table() const { return samples_; }
  double truncation_horizon_s() const { return truncation_s_; }

  /// h(t) in degC/J. Tabulated kernels interpolate linearly.
  double evaluate(double t_s) const;

  /// Steady-state rise per watt: sum of stage R (parametric) or dt * sum h.
  double total_resistance() const;

  double peak() const;

 private:
  ImpulseResponse() = default;

  bool parametric_ = false;
  std::vector<ThermalStage> stages_;
  double truncation_s_ = 0.0;
  double dt_s_ = 0.0;
  std::vector<double> samples_;
};

/// Fraction of the peak below which the last tabulated sample must fall.
inline constexpr double kKernelTailFraction = 0.01;

/// Samples h on a grid of step dt_s: h[k] = h(k dt_s) up to the truncation
/// horizon for parametric kernels, linear resampling for tabulated ones.
ImpulseResponse tabulate(const ImpulseResponse& response, double dt_s);

/// Temperature rise of one stage for a rectangular power pulse of amplitude
/// amplitude_w starting at 0 and lasting pulse_s, evaluated at t_s:
/// B(1 - e^{-t/theta}) during the pulse, B[(1 - e^{-t/theta}) - (1 - e^{-(t - pulse)/theta})]
/// after it, with B = amplitude * R.
double pulse_response_closed_form(double amplitude_w, double pulse_s, ThermalStage stage, double t_s);

/// Largest temperature rise produced by one isolated pulse. Closed form for
/// parametric kernels (all stages peak at the pulse end); numeric for tabulated.
double single_pulse_peak_rise(const ImpulseResponse& response, double amplitude_w, double pulse_s,
                              double dt_s);

/**
 * tau[n] = ambient + dt * sum_{k<=n} p[k] h[n-k].
 *
 * Parametric kernels are evaluated with the exact first-order recursion for
 * the untruncated sampled kernel, so any dt is accepted. Tabulated kernels
 * must share the power trace's dt (std::invalid_argument otherwise).
 */
TimeSeries convolve_temperature(const TimeSeries& power, const ImpulseResponse& response,
                                double ambient_c, Exec exec = Exec::parallel);

namespace kernels {

// All kernels return the rise dt * sum_{k<=n} p[k] h[n-k] for n < p.size().

/// Reference O(N*K) causal convolution.
std::vector<double> convolve_direct_serial(std::span<const double> power, std::span<const double> h,
                                           double dt_s);

/// Same summation order as the serial reference, output indices split across threads.
std::vector<double> convolve_direct_omp(std::span<const double> power, std::span<const double> h,
                                        double dt_s);

/// Piecewise-constant inputs: sum over level changes of delta * step response.
/// O(N * number of level changes).
std::vector<double> convolve_step_superposition(std::span<const double> power,
                                                std::span<const double> h, double dt_s);

/// Exact recursion for h[k] = sum_i (R_i/theta_i) exp(-k dt/theta_i), no truncation.
std::vector<double> convolve_recursive(std::span<const double> power,
                                       std::span<const ThermalStage> stages, double dt_s);

/// Number of indices n > 0 with power[n] != power[n-1].
std::size_t count_level_changes(std::span<const double> power);

}  // namespace kernels

/// Parses `time_s,response_c_per_j` with a uniform grid starting at 0.
/// Throws ConfigError with line context on malformed input.
ImpulseResponse load_impulse_csv(const std::filesystem::path& path);

/// Writes a tabulated kernel in the format read by load_impulse_csv.
void write_impulse_csv(const std::filesystem::path& path, const ImpulseResponse& tabulated);

}  // namespace tao
