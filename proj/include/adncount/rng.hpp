#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace adn {

/// SplitMix64 finalizer (Steele, Lea, Flood). Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a master seed and two indices.
///
///   derive_seed(m, a, b) = mix64(mix64(m + G*(a+1)) + G*(b+1)),
///   G = 0x9E3779B97F4A7C15 (the 64-bit golden-ratio increment),
///
/// with all arithmetic modulo 2^64. Sweeps use (config index, repetition),
/// schedules use (stream tag, epoch).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b) noexcept;

/// Seeded random source with portable distributions.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions below are implemented here instead of using
/// <random>'s, whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// True with probability p; p <= 0 never fires, p >= 1 always does.
  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace adn
