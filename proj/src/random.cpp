#include "rtllock/random.hpp"

#include <cassert>

namespace rtllock {

std::size_t Rng::below(std::size_t n) {
  assert(n > 0);
  const std::uint64_t bound = n;
  // Reject the low values that would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) {
      return static_cast<std::size_t>(r % bound);
    }
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rtllock
