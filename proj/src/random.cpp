#include "radmaxlab/random.hpp"

#include <cmath>

#include "radmaxlab/core.hpp"

namespace radmaxlab {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ULL;
  x ^= x >> 33;
  return x;
}

}  // namespace

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

RandomSource RandomSource::substream(std::uint64_t id) const {
  return RandomSource{seed, mix(stream * 0x9E3779B97F4A7C15ULL + id + 1)};
}

CounterRng RandomSource::engine(std::uint64_t index) const {
  return CounterRng(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL)) ^
                    mix(index + 0x8CB92BA72F3D8DD7ULL));
}

}  // namespace radmaxlab
