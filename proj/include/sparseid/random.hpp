#pragma once

#include <cstdint>

namespace sparseid {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a stream index:
/// `splitmix64(parent ^ splitmix64(index))`. Chain calls for nested indices,
/// e.g. `mix_seed(mix_seed(master, variance_index), profile_index)`.
constexpr std::uint64_t mix_seed(std::uint64_t parent,
                                 std::uint64_t index) noexcept {
  return splitmix64(parent ^ splitmix64(index));
}

/// Counter-based generator: draw i is a pure function of (key, i), so any
/// stream can be reproduced on any platform without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t bits_at(std::uint64_t i) const noexcept {
    return splitmix64(key_ ^ splitmix64(i));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t i) const noexcept {
    return static_cast<double>(bits_at(i) >> 11) * 0x1.0p-53;
  }

  /// Standard normal for draw i via Box-Muller (cosine branch) on the
  /// uniforms at counters 2i and 2i+1. The first uniform is shifted to
  /// (0, 1] so the logarithm is finite.
  double normal_at(std::uint64_t i) const noexcept;

  double next_uniform() noexcept { return uniform_at(counter_++); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sparseid
