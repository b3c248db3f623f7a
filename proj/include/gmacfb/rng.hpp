#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

namespace gmacfb {

// Counter-based random number generation. Every draw is a pure function of
// (master_seed, trial_index, time, stream), so trials can run in any order
// (or in parallel) and still produce bit-identical results.
namespace rng {

constexpr std::uint64_t kStreamNoiseMain = 0;  // eta1
constexpr std::uint64_t kStreamNoiseTap = 1;   // eta2
constexpr std::uint64_t kStreamState = 2;      // S
constexpr std::uint64_t kStreamMessage1 = 3;
constexpr std::uint64_t kStreamMessage2 = 4;

// SplitMix64 finalizer (Vigna). Full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless hash of the full counter tuple. Chained finalizers so that
// nearby tuples land in unrelated points of the output space.
inline std::uint64_t counter_hash(std::uint64_t master_seed, std::uint64_t trial,
                                  std::uint64_t time, std::uint64_t stream) {
    std::uint64_t h = mix64(stream ^ 0x6a09e667f3bcc909ULL);
    h = mix64(h ^ time);
    h = mix64(h ^ trial);
    h = mix64(h ^ master_seed);
    return h;
}

// Uniform in (0,1], 53-bit resolution. Never returns 0, so log() is safe.
inline double uniform_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard Gaussian via Box-Muller on two derived uniforms.
inline double gaussian(std::uint64_t master_seed, std::uint64_t trial,
                       std::uint64_t time, std::uint64_t stream) {
    const std::uint64_t h = counter_hash(master_seed, trial, time, stream);
    const double u1 = uniform_open(mix64(h ^ 0xd1b54a32d192ed03ULL));
    const double u2 = uniform_open(mix64(h ^ 0x8cb92ba72f3d8dd7ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform integer in [1, n] without modulo bias worth worrying about at
// n <= 2^60 (bias < 2^-4 ulp of the acceptance probability).
inline std::int64_t uniform_index(std::uint64_t master_seed, std::uint64_t trial,
                                  std::uint64_t time, std::uint64_t stream,
                                  std::int64_t n) {
    const std::uint64_t h = counter_hash(master_seed, trial, time, stream);
    return static_cast<std::int64_t>(h % static_cast<std::uint64_t>(n)) + 1;
}

}  // namespace rng

// Identifies one Monte Carlo trial. Same pair => bit-identical transcript.
struct TrialSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

}  // namespace gmacfb
