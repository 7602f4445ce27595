#pragma once

// Counter-based random streams. Every stream is a pure function of a 64-bit
// key, so draws can be addressed by (seed, node, step) and evaluated in any
// order or on any thread.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace netrct {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a sequence of words into one stream key.
constexpr std::uint64_t derive_key(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t key = mix64(seed + kGolden);
  for (std::uint64_t w : words) key = mix64(key ^ mix64(w + kGolden));
  return key;
}

/// SplitMix64 sequence starting at `key`. Satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterStream(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace netrct
