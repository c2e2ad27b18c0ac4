#pragma once
#include <cmath>
#include <cstdint>

namespace ries {

// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
// needed so that identical seeds give identical results regardless of
// platform or standard-library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller (cos branch only; one draw per call pair).
  double normal() {
    double u1 = u01(), u2 = u01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

// Independent stream for (seed, a, b): lets parallel or reordered evaluation
// produce the same draws as a sequential run.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  Rng mix(seed ^ (a * 0xD1342543DE82EF95ull) ^ (b * 0x9E3779B97F4A7C15ull));
  mix.next_u64();
  return Rng(mix.next_u64());
}

}  // namespace ries
