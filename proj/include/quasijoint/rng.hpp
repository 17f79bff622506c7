#pragma once

#include <cmath>
#include <cstdint>

namespace qj {

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// splitmix64 counter generator; (seed, stream) pairs give independent
// sequences because the two keys are avalanche-mixed into the start state
struct SplitMix64 {
  uint64_t state = 0;

  SplitMix64() = default;
  explicit SplitMix64(uint64_t seed) : state(mix64(seed + 0x9e3779b97f4a7c15ULL)) {}
  SplitMix64(uint64_t seed, uint64_t stream)
      : state(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
              mix64(stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL)) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return std::ldexp(double(next() >> 11), -53); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  // standard normal via Box-Muller (one value per call, deterministic)
  double normal() {
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }
};

}  // namespace qj
