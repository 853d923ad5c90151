#include "tao/arrivals.hpp"

#include <cmath>

namespace tao {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> poisson_arrivals(std::mt19937_64& rng, double rate_per_s, double horizon_s) {
  std::vector<double> times;
  if (!(rate_per_s > 0.0)) return times;
  double t = 0.0;
  while (true) {
    t += -std::log1p(-uniform01(rng)) / rate_per_s;
    if (t > horizon_s) break;
    times.push_back(t);
  }
  return times;
}

}  // namespace tao
