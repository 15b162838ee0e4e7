#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace nalb {

// Counter-based stream RNG built on splitmix64: the i-th draw is
// mix64(seed + (i+1) * GOLDEN) where mix64 is the splitmix64 finalizer.
// Draws are addressable by counter, so a stream can be replayed or
// indexed at random (used for the shared per-step noise stream).
struct CounterRng {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  explicit CounterRng(std::uint64_t seed_in = 0) : seed(seed_in) {}

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGolden);
  }

  std::uint64_t next_u64() { return at(seed, counter++); }

  // Uniform in [0, 1); 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("uniform: lo > hi");
    return lo + (hi - lo) * next_double();
  }

  // Box-Muller; consumes two uniforms per normal pair, caches the spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Derive an independent stream keyed by a small tag tuple.
  static CounterRng derive(std::uint64_t seed, std::uint64_t tag_a,
                           std::uint64_t tag_b = 0) {
    return CounterRng(mix64(mix64(seed ^ mix64(tag_a)) ^ mix64(tag_b)));
  }

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nalb
