#pragma once

#include <cstdint>
#include <random>

namespace lisac {

// Deterministic random stream. Uniform and normal variates are derived from
// raw mt19937_64 output instead of std:: distributions, so sequences are
// identical across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; one spare is cached.
  double normal();

  // Uniform integer in [0, n), unbiased.
  std::uint64_t index(std::uint64_t n);

  // Derive a decorrelated child seed for a named stream (splitmix64 mix).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lisac
