#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tao {

/// 64-bit Mersenne Twister seeded from (seed, stream, tag) through seed_seq,
/// so independent streams can be derived from one user seed.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

/// Arrival times of a homogeneous Poisson process on [0, horizon_s]
/// (exponential inter-arrivals with the given rate).
std::vector<double> poisson_arrivals(std::mt19937_64& rng, double rate_per_s, double horizon_s);

namespace stream_tag {
inline constexpr std::uint64_t arrivals = 0x41;
inline constexpr std::uint64_t coins = 0x43;
inline constexpr std::uint64_t marks = 0x4d;
}  // namespace stream_tag

}  // namespace tao
