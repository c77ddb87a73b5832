#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace cghz {

// SplitMix64 (Steele, Lea, Flood 2014). Every sampling routine in the library
// draws from this engine so that seeded runs are reproducible across
// standard libraries; std:: distributions are deliberately not used.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Independent substream for index i; does not advance this generator.
  SplitMix64 split(std::uint64_t i) const { return SplitMix64(mix(state_ ^ mix(i + 0x632BE59BD9B4E019ull))); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Seed for shot `index` of a run seeded with `seed`; independent of thread
// scheduling.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64::mix(SplitMix64::mix(seed) ^ SplitMix64::mix(index + 0x632BE59BD9B4E019ull));
}

// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; consumes two draws per call.
template <class Engine>
double standard_normal(Engine& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cghz
