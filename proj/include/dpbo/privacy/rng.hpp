#ifndef DPBO_PRIVACY_RNG_HPP
#define DPBO_PRIVACY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "dpbo/common.hpp"

namespace dpbo::privacy {

// Seeded random stream with a pinned cross-platform algorithm so that runs
// are exactly reproducible. The commitment (also in the README):
//
//   engine        std::mt19937_64 (algorithm fixed by the C++ standard)
//   uniform01     (next_u64() >> 11) * 2^-53, in [0, 1)
//   gauss         Marsaglia polar method over uniform01, the second variate
//                 of each accepted pair is discarded (no caching)
//   uniform_int   rejection sampling on next_u64(), unbiased
//   child streams seed' = splitmix64_mix(seed ^ fnv1a64(label))
//
// Distinct logical noise sources must use distinct child streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal draw, Marsaglia polar method without caching.
  double gauss() {
    for (;;) {
      const double v1 = 2.0 * uniform01() - 1.0;
      const double v2 = 2.0 * uniform01() - 1.0;
      const double s = v1 * v1 + v2 * v2;
      if (s >= 1.0 || s == 0.0) continue;
      return v1 * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  void gauss_vector(double sigma, Vec& out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = sigma * gauss();
  }

  // Uniform integer in [0, bound).
  std::uint64_t uniform_int(std::uint64_t bound) {
    require(bound > 0, ErrorCode::invalid_argument,
            "Rng::uniform_int: bound must be positive");
    const std::uint64_t residue = (~bound + 1) % bound;  // 2^64 mod bound
    const std::uint64_t limit = ~std::uint64_t{0} - residue;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x <= limit) return x % bound;
    }
  }

  // Independent child stream for the named noise source.
  Rng child(std::string_view label) const {
    return Rng(splitmix64_mix(seed_ ^ fnv1a64(label)));
  }

  Rng child(std::string_view label, std::uint64_t index) const {
    return child(std::string(label) + "/" + std::to_string(index));
  }

  static std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  static std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dpbo::privacy

#endif
