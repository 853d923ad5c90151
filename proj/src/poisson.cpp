#include "tao/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tao {

namespace {

void check_args(std::int64_t k, double mean) {
  if (k < 0) throw std::invalid_argument("Poisson support index must be >= 0");
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be finite and >= 0");
}

double log_pmf(std::int64_t k, double mean) {
  const auto kd = static_cast<double>(k);
  return kd * std::log(mean) - mean - std::lgamma(kd + 1.0);
}

// Terms below this index, or above the upper bound, are below ~1e-300 of the mass.
std::int64_t lower_support(double mean) {
  const double lo = std::floor(mean - 40.0 * std::sqrt(mean) - 40.0);
  return lo > 0.0 ? static_cast<std::int64_t>(lo) : 0;
}

std::int64_t upper_support(double mean) {
  return static_cast<std::int64_t>(std::ceil(mean + 40.0 * std::sqrt(mean) + 60.0));
}

// Sum of pmf over [from, to], walking outward from the term nearest the mode so
// nothing underflows before it is reached.
double sum_pmf(std::int64_t from, std::int64_t to, double mean) {
  if (to < from) return 0.0;
  const auto mode = static_cast<std::int64_t>(std::floor(mean));
  const std::int64_t anchor = std::clamp(mode, from, to);
  const double a = std::exp(log_pmf(anchor, mean));
  double down = 0.0;
  double term = a;
  for (std::int64_t i = anchor; i > from; --i) {
    term *= static_cast<double>(i) / mean;
    if (term == 0.0) break;
    down += term;
  }
  double up = 0.0;
  term = a;
  for (std::int64_t i = anchor; i < to; ++i) {
    term *= mean / static_cast<double>(i + 1);
    if (term == 0.0) break;
    up += term;
  }
  return a + down + up;
}

}  // namespace

double poisson_pmf(std::int64_t k, double mean) {
  check_args(k, mean);
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(log_pmf(k, mean));
}

double poisson_cdf(std::int64_t k, double mean) {
  check_args(k, mean);
  if (mean == 0.0) return 1.0;
  const std::int64_t lo = lower_support(mean);
  const std::int64_t hi = upper_support(mean);
  if (k >= hi) return 1.0;
  // above the mean the complement is the small side; rounding 1 - tail keeps monotonicity
  if (static_cast<double>(k) >= mean) return std::max(0.0, 1.0 - sum_pmf(k + 1, hi, mean));
  return std::min(1.0, sum_pmf(std::max<std::int64_t>(lo, 0), k, mean));
}

std::int64_t poisson_quantile(double omega, double mean) {
  if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  check_args(0, mean);
  if (mean == 0.0) return 0;
  // start at the mean and settle against poisson_cdf itself
  std::int64_t k = static_cast<std::int64_t>(std::floor(mean));
  const std::int64_t stop = upper_support(mean);
  while (k <= stop && poisson_cdf(k, mean) < omega) ++k;
  while (k > 0 && poisson_cdf(k - 1, mean) >= omega) --k;
  return k;
}

std::int64_t poisson_truncation(double mean) {
  check_args(0, mean);
  return static_cast<std::int64_t>(std::ceil(mean + 20.0 * std::sqrt(mean) + 20.0));
}

}  // namespace tao
