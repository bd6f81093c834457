#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace wetsim {

// Seeded generator with splittable substreams. Every piece of randomness in
// the toolkit flows through one of these; substream ids make parallel
// Monte-Carlo trials reproducible independent of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_seed_(seed), engine_(mix(seed, 0x9e3779b97f4a7c15ull)) {}

  // Derived stream, independent of this stream's draw position.
  Rng substream(std::uint64_t id) const { return Rng(mix(base_seed_, id)); }
  Rng substream(std::uint64_t a, std::uint64_t b) const { return Rng(mix(mix(base_seed_, a), b)); }

  std::uint64_t u64() { return engine_(); }

  // Uniform in [0, 1). Hand-rolled from the raw 64-bit draw so the stream is
  // identical across standard-library implementations.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; no cached second value, so substream
  // splitting never changes results.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double sigma) { return sigma <= 0.0 ? 0.0 : sigma * normal(); }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t base_seed() const { return base_seed_; }

 private:
  // splitmix64 finalizer, used both for seeding and stream derivation.
  static std::uint64_t mix(std::uint64_t z, std::uint64_t salt) {
    z += 0x9e3779b97f4a7c15ull + salt * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t base_seed_;
  std::mt19937_64 engine_;
};

}  // namespace wetsim
