#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tao/thermal.hpp"

namespace tao::kernels {

namespace {

// One output sample; both direct kernels share it so their summation order
// is identical.
inline double direct_output(std::span<const double> p, std::span<const double> h, std::size_t n) {
  const std::size_t k_min = n + 1 > h.size() ? n + 1 - h.size() : 0;
  double acc = 0.0;
  for (std::size_t k = k_min; k <= n; ++k) acc += p[k] * h[n - k];
  return acc;
}

}  // namespace

std::vector<double> convolve_direct_serial(std::span<const double> power, std::span<const double> h,
                                           double dt_s) {
  std::vector<double> out(power.size(), 0.0);
  if (h.empty()) return out;
  for (std::size_t n = 0; n < power.size(); ++n) out[n] = dt_s * direct_output(power, h, n);
  return out;
}

std::vector<double> convolve_direct_omp(std::span<const double> power, std::span<const double> h,
                                        double dt_s) {
  std::vector<double> out(power.size(), 0.0);
  if (h.empty()) return out;
  const auto n_out = static_cast<std::ptrdiff_t>(power.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < n_out; ++n)
    out[static_cast<std::size_t>(n)] = dt_s * direct_output(power, h, static_cast<std::size_t>(n));
  return out;
}

std::size_t count_level_changes(std::span<const double> power) {
  std::size_t changes = 0;
  for (std::size_t n = 1; n < power.size(); ++n)
    if (power[n] != power[n - 1]) ++changes;
  return changes;
}

std::vector<double> convolve_step_superposition(std::span<const double> power, std::span<const double> h,
                                                double dt_s) {
  std::vector<double> out(power.size(), 0.0);
  if (h.empty() || power.empty()) return out;
  // step[m] = dt * sum_{j<=m} h[j], flat once the kernel ends
  std::vector<double> step(h.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    acc += h[j];
    step[j] = dt_s * acc;
  }
  const double step_final = step.back();
  double previous = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    const double delta = power[k] - previous;
    previous = power[k];
    if (delta == 0.0) continue;
    const std::size_t ramp_end = std::min(power.size(), k + step.size());
    for (std::size_t n = k; n < ramp_end; ++n) out[n] += delta * step[n - k];
    for (std::size_t n = ramp_end; n < power.size(); ++n) out[n] += delta * step_final;
  }
  return out;
}

std::vector<double> convolve_recursive(std::span<const double> power, std::span<const ThermalStage> stages,
                                       double dt_s) {
  std::vector<double> out(power.size(), 0.0);
  for (const auto& s : stages) {
    const double decay = std::exp(-dt_s / s.theta_s);
    const double gain = dt_s * s.r_th_c_per_w / s.theta_s;
    double state = 0.0;
    for (std::size_t n = 0; n < power.size(); ++n) {
      state = decay * state + gain * power[n];
      out[n] += state;
    }
  }
  return out;
}

}  // namespace tao::kernels
