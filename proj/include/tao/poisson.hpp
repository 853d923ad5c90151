#pragma once

#include <cstdint>

namespace tao {

/// P(N = k), N ~ Poisson(mean), evaluated in log space.
/// Throws std::invalid_argument for negative k or mean.
double poisson_pmf(std::int64_t k, double mean);

/// P(N <= k). Throws std::invalid_argument for negative k or mean.
double poisson_cdf(std::int64_t k, double mean);

/// Smallest k with poisson_cdf(k, mean) >= omega.
/// Throws std::invalid_argument unless 0 < omega < 1 and mean >= 0.
std::int64_t poisson_quantile(double omega, double mean);

/// Truncation point for infinite sums over a Poisson support: mean + 20 sqrt(mean) + 20.
std::int64_t poisson_truncation(double mean);

}  // namespace tao
