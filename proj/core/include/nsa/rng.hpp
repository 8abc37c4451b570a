#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace nsa {

// Random source owned by a single chain. All variates are derived from the
// raw 64-bit engine output by fixed formulas, so a given seed reproduces the
// same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x5eed) : engine_(seed) {}

  // Independent stream `stream_id` derived from a master seed.
  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t s = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
    return Rng(splitmix64(s));
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    __uint128_t m = static_cast<__uint128_t>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        m = static_cast<__uint128_t>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller; one variate per call, two uniforms.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Exp(1).
  double exponential() { return -std::log(uniform_pos()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nsa
