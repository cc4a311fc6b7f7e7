#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace circnoise {

/// Name of the random stream; recorded in run manifests so test vectors can be
/// regenerated in other languages.
inline constexpr std::string_view kRngName = "splitmix64-boxmuller/1";

// SplitMix64 (Steele, Lea, Flood 2014). 64-bit state, one output per call.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1]; 53 random bits.
  double uniform_open0() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Standard normal stream. Box-Muller on pairs of uniforms; the cosine branch
/// is returned first and the sine branch is cached for the following call.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) noexcept : gen_(seed) {}

  double operator()() noexcept {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = gen_.uniform_open0();
    const double u2 = gen_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  SplitMix64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Seed for replicate `index` of a study seeded with `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  SplitMix64 g(base ^ (index * 0xD1B54A32D192ED03ULL));
  g.next();
  return g.next();
}

}  // namespace circnoise
