#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace dpi {

/// Deterministic random stream. The generator core is std::mt19937_64 (fully
/// specified by the standard); all samplers are implemented here instead of
/// relying on std:: distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t raw() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive. Rejection sampling keeps the
  /// stream unbiased and platform-stable.
  int uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via the polar (Marsaglia) method; one spare is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double a, b, s;
    do {
      a = 2.0 * uniform() - 1.0;
      b = 2.0 * uniform() - 1.0;
      s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = b * m;
    has_spare_ = true;
    return a * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Index sampled proportionally to the (non-negative) weights.
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  /// Uniform point on the (d-1)-simplex, i.e. Dirichlet(1, ..., 1).
  std::vector<double> simplex(int d) {
    std::vector<double> w(static_cast<size_t>(d));
    double total = 0.0;
    for (auto& x : w) {
      x = -std::log(1.0 - uniform());
      total += x;
    }
    for (auto& x : w) x /= total;
    return w;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable named substream derived from a root seed (FNV-1a over the name,
/// mixed with the root). Adding a new stream name never perturbs others.
inline uint64_t substream(uint64_t root, std::string_view name) {
  uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<uint8_t>(c);
    h *= 1099511628211ull;
  }
  // splitmix64 finalizer over the combined value
  uint64_t z = root ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace dpi
