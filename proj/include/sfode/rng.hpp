#pragma once

#include <cstdint>
#include <random>

namespace sfode {

// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0) noexcept;

// Seeded 64-bit generator with platform-independent real mappings.
// std::uniform_real_distribution is implementation defined, so the
// conversions here are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0,1) with 53-bit resolution.
  double uniform01();
  // Uniform on the grid {m 2^-32 : m = 0..2^32-1}.
  double grid01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Uniform integer in [lo, hi], both inclusive.
  std::int64_t integer(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace sfode
