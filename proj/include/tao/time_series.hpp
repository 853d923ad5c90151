#pragma once

#include <cstddef>
#include <vector>

namespace tao {

/// Absolute slack applied to every constraint check, in native units.
inline constexpr double kFeasibilitySlack = 1e-9;

/// Uniformly sampled signal: samples[i] is the value at t0_s + i * dt_s.
struct TimeSeries {
  double t0_s = 0.0;
  double dt_s = 1.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double time(std::size_t i) const { return t0_s + dt_s * static_cast<double>(i); }
  double front() const { return samples.front(); }
  double back() const { return samples.back(); }
  double max() const;
  double min() const;

  /// Keeps every `stride`-th sample starting at index 0.
  TimeSeries downsample(std::size_t stride) const;
};

/// Number of grid points of a uniform grid spanning [0, horizon_s]:
/// floor(horizon_s / dt_s) + 1, robust to representation error in the ratio.
std::size_t grid_size(double horizon_s, double dt_s);

/// Index of the grid point nearest to t_s, clamped to [0, n - 1].
std::size_t nearest_index(double t_s, double dt_s, std::size_t n);

}  // namespace tao
