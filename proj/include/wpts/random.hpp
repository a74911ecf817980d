#pragma once

#include <cstdint>
#include <random>

namespace wpts {

// splitmix64 finalizer; used to hash (seed, tag...) tuples into stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random source. Every stochastic element of the simulator
/// draws from an explicit Rng, so a run is reproducible bit-for-bit from its
/// seed. The samplers avoid std:: distributions, whose output is
/// implementation-defined, in favor of fixed bit manipulation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Fixed-point multiply keeps the mapping exact
  // and platform-independent.
  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(engine_()) *
                             static_cast<unsigned __int128>(n)) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

// Seed for a named sub-stream of `base`. Separate streams keep exogenous
// randomness (topology, channels, arrivals) decoupled from decision
// randomness, which is what makes paired-seed policy comparisons exact.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(base ^ 0x243f6a8885a308d3ULL);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

// Stream tags used with derive_seed throughout the harness.
enum StreamTag : std::uint64_t {
  kTopologyStream = 1,
  kChannelStream = 2,
  kArrivalStream = 3,
  kDecisionStream = 4,
  kGapStream = 5,
};

}  // namespace wpts
