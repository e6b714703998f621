#ifndef SIGMALAB_RNG_HPP
#define SIGMALAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sigmalab {

/// Counter-based generator: draw i of stream s is splitmix64(seed, s, i).
/// Identical across platforms and independent of call order between streams.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(seed_ ^ mix(stream_ * 0x9E3779B97F4A7C15ULL + counter));
  }
  std::uint64_t next_bits() { return bits(counter_++); }
  /// Uniform on (0, 1).
  double uniform() { return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53; }
  /// Standard normal by Box-Muller.
  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace sigmalab

#endif
