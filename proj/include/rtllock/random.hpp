#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace rtllock {

/// Seedable 64-bit random stream (MT19937-64).
///
/// Bounded draws and shuffles are implemented here rather than through
/// std::uniform_int_distribution / std::shuffle, whose output differs between
/// standard library implementations. A given seed therefore yields the same
/// locking decisions on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  bool coin() { return (engine_() >> 63) != 0; }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent seed for sub-stream `stream` of `seed` (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rtllock
