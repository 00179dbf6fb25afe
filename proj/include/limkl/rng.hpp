#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace limkl {

// Counter-based SplitMix64 stream. Every consumer of randomness in the
// library derives its own substream from (seed, tag[, index]), so outputs
// are reproducible regardless of evaluation order. The exact construction
// is documented in the README; changing it changes every seeded result.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return h;
  }

  // SplitMix64 output mix.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                             std::uint64_t index = 0) {
    std::uint64_t s = mix(seed + 0x9E3779B97F4A7C15ull);
    s = mix(s ^ fnv1a(tag));
    s = mix(s ^ index);
    return s;
  }

  static Rng substream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
    return Rng(derive_seed(seed, tag, index));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller (trigonometric form), pairs cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace limkl
