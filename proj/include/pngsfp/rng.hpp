#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pngsfp/errors.hpp"

namespace pngsfp {

// Splittable deterministic RNG. Streams are derived by hashing the seed with
// stream labels, so per-agent streams are reproducible independently of
// iteration or thread order.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {
    // Decorrelate trivially related seeds.
    next_u64();
    next_u64();
  }

  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL + b * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Independent stream for (seed, labels...).
  template <typename... Ids>
  static Rng stream(uint64_t seed, Ids... ids) {
    uint64_t s = seed;
    ((s = mix(s, static_cast<uint64_t>(ids))), ...);
    return Rng(s);
  }

  uint64_t next_u64() {  // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() {  // in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_open() {  // in (0, 1)
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double normal() {  // polar method
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Marsaglia-Tsang squeeze method; alpha < 1 boosted via Gamma(alpha+1)*U^(1/alpha).
  double gamma(double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("gamma shape must be positive");
    if (alpha < 1.0) {
      const double u = uniform_open();
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  std::vector<double> dirichlet(const std::vector<double>& alpha) {
    std::vector<double> x(alpha.size());
    double sum = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) sum += (x[i] = gamma(alpha[i]));
    for (double& v : x) v /= sum;
    return x;
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pngsfp
