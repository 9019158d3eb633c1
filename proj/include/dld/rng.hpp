#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace dld {

/// splitmix64 finalizer: full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

/// Deterministic PRNG (splitmix64). The library rolls its own draws instead
/// of using <random> distributions so that seeded runs produce identical
/// streams regardless of standard-library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n) by rejection. n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t v = next();
    while (v < threshold) v = next();
    return v % n;
  }

  /// Standard normal draw (Box-Muller, cosine branch).
  double gaussian() {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline void seed_fold(std::uint64_t& h, std::uint64_t part) {
  h = mix64(h ^ (part + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
}
}  // namespace detail

/// Order-sensitive derivation of a new seed from a base seed plus context
/// parts (sizes, fold indices, bit patterns of reals, ...). Used so that
/// sub-seeds depend on what a computation is, never on loop position.
template <typename... Parts>
std::uint64_t seed_combine(std::uint64_t seed, Parts... parts) {
  std::uint64_t h = mix64(seed);
  (detail::seed_fold(h, static_cast<std::uint64_t>(parts)), ...);
  return h;
}

/// Fisher-Yates shuffle driven by Rng; same result on every platform.
template <typename T>
void shuffle(std::vector<T>& xs, Rng& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) {
    std::swap(xs[i - 1], xs[rng.below(i)]);
  }
}

}  // namespace dld
