#ifndef SALAB_RNG_HPP
#define SALAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace salab {

/// Seed for replica `replica_index` of a run keyed by `master_seed`.
///
/// Rule (stable across versions): z = master_seed + (replica_index + 1) * 0x9E3779B97F4A7C15
/// modulo 2^64, followed by the splitmix64 finalizer. The finalizer is a bijection on 64-bit
/// words and the golden-ratio increment is odd, so the map is injective in replica_index for a
/// fixed master seed.
constexpr std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t replica_index)
{
  std::uint64_t z = master_seed + (replica_index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded generator with platform-independent variate transforms.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the standard. The
/// std::*_distribution adaptors are implementation-defined, so the transforms below are spelled
/// out to keep sample streams bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_open_zero() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; always consumes exactly two words.
  double normal()
  {
    const double u1 = uniform_open_zero();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Random sign, one word.
  double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

  std::uint64_t next_word() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace salab

#endif  // SALAB_RNG_HPP
