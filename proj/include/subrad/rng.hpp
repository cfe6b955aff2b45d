#pragma once

#include <cstdint>
#include <random>

// Seedable random numbers with a fully documented algorithm so that
// ensembles are reproducible:
//   * stream seeds are derived from (base seed, stream index) with
//     splitmix64, so distinct realizations get decorrelated streams;
//   * the generator is std::mt19937_64, whose output sequence is fixed
//     by the C++ standard;
//   * standard normal deviates use the Marsaglia polar method on top of
//     53-bit uniforms, avoiding the implementation-defined
//     std::normal_distribution.

namespace subrad::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for the index-th stream of an ensemble rooted at base_seed.
inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t s = base_seed;
  std::uint64_t mixed = splitmix64(s);
  s = mixed ^ (index + 0x9E3779B97F4A7C15ULL);
  return splitmix64(s);
}

class Normal {
 public:
  explicit Normal(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal deviate (polar method, pairs cached).
  double operator()() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * m;
    have_cached_ = true;
    return u * m;
  }

 private:
  std::mt19937_64 engine_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace subrad::rng
