#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace satdebias {

/// Portable seeded generator. std::mt19937_64 output is fixed by the
/// standard; the distributions in <random> are not, so index draws use
/// rejection sampling on the raw engine output instead.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be > 0.
  std::uint64_t index(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Fisher-Yates over the first `count` positions; the first `count`
  /// elements become a uniform sample in random order.
  template <typename T>
  void partial_shuffle(std::vector<T>& items, std::size_t count) {
    const std::size_t n = items.size();
    for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(index(n - i));
      using std::swap;
      swap(items[i], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    partial_shuffle(items, items.size());
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; mixes a base seed with a stream tag.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// FNV-1a, used for stable string hashing (std::hash is unspecified).
constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace satdebias
