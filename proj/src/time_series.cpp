#include "tao/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tao {

double TimeSeries::max() const {
  if (samples.empty()) throw std::logic_error("max of empty time series");
  return *std::max_element(samples.begin(), samples.end());
}

double TimeSeries::min() const {
  if (samples.empty()) throw std::logic_error("min of empty time series");
  return *std::min_element(samples.begin(), samples.end());
}

TimeSeries TimeSeries::downsample(std::size_t stride) const {
  if (stride == 0) throw std::invalid_argument("downsample stride must be positive");
  TimeSeries out{t0_s, dt_s * static_cast<double>(stride), {}};
  out.samples.reserve(samples.size() / stride + 1);
  for (std::size_t i = 0; i < samples.size(); i += stride) out.samples.push_back(samples[i]);
  return out;
}

std::size_t grid_size(double horizon_s, double dt_s) {
  if (!(dt_s > 0.0) || !(horizon_s >= 0.0)) throw std::invalid_argument("grid needs dt > 0 and horizon >= 0");
  const double ratio = horizon_s / dt_s;
  return static_cast<std::size_t>(std::floor(ratio + 1e-9)) + 1;
}

std::size_t nearest_index(double t_s, double dt_s, std::size_t n) {
  if (n == 0) return 0;
  const double idx = std::round(t_s / dt_s);
  if (idx <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(idx), n - 1);
}

}  // namespace tao
