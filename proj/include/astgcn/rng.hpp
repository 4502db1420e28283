#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace astgcn {

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; all value transforms are hand-rolled so
/// generated streams never depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Standard normal via Box-Muller (no cached spare).
  double normal() {
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Poisson sample via Knuth's product method; large means are split so the
  /// exp(-lambda) factor never underflows.
  long poisson(double lambda) {
    long total = 0;
    while (lambda > 30.0) {
      total += poisson_small(30.0);
      lambda -= 30.0;
    }
    return total + poisson_small(lambda);
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {  // Fisher-Yates
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

 private:
  long poisson_small(double lambda) {
    if (lambda <= 0.0) return 0;
    const double threshold = std::exp(-lambda);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > threshold);
    return k - 1;
  }

  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a salt
/// (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace astgcn
