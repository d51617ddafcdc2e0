#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace d4l {

// Deterministic random source built on std::mt19937_64.
//
// The engine's output sequence is fully specified by the C++ standard, but
// the standard *distributions* are not, so uniforms and gaussians are derived
// here explicitly:
//   uniform():  (x >> 11) * 2^-53, the top 53 bits of one engine draw
//   gaussian(): Box-Muller transform of two uniforms (pair cached)
// This makes streams reproducible bit-for-bit for a given seed, independent
// of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return static_cast<int>(x % bound);
  }

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // log(0) guard
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace d4l
