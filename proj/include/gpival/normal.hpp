#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gpival {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF), Wichura's AS 241 (PPND16).
// Throws std::domain_error for p outside (0, 1).
double normal_quantile(double p);

// Seeded RNG with platform-independent mappings. std::mt19937_64 has a
// standard-defined bit stream; the distribution mappings below are fixed
// here so outputs are reproducible across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Standard normal via inverse-CDF of a uniform draw.
  double normal() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return normal_quantile(u);
  }

  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 step; used for order-independent per-point noise seeding.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gpival
