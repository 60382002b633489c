#pragma once

#include <cstdint>
#include <limits>

namespace radmaxlab {

/// Small counter-seeded generator (splitmix64). Satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// +1 or -1 with equal probability.
  double sign() { return ((*this)() >> 63) ? -1.0 : 1.0; }
  /// Standard normal via Box-Muller (no cached second value, so the
  /// stream is a pure function of the draw count).
  double normal();

 private:
  std::uint64_t state_;
};

/// Reproducible source of randomness: every sample index of every stream
/// maps to its own generator, so evaluation order and thread count do not
/// affect the values drawn.
struct RandomSource {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RandomSource substream(std::uint64_t id) const;
  CounterRng engine(std::uint64_t index) const;
};

}  // namespace radmaxlab
