#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dpi {

/// Number of reward objectives. Both environments expose five components.
inline constexpr int kRewardDim = 5;

using Vec5 = std::array<double, kRewardDim>;

/// A point on the 4-simplex weighting the five objectives.
using Pref = Vec5;

inline double dot5(const Vec5& a, const Vec5& b) {
  double s = 0.0;
  for (int i = 0; i < kRewardDim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm5(const Vec5& a) { return std::sqrt(dot5(a, a)); }

inline Vec5 softmax5(const Vec5& z) {
  double mx = z[0];
  for (int i = 1; i < kRewardDim; ++i) mx = std::max(mx, z[i]);
  Vec5 out{};
  double total = 0.0;
  for (int i = 0; i < kRewardDim; ++i) {
    out[i] = std::exp(z[i] - mx);
    total += out[i];
  }
  for (int i = 0; i < kRewardDim; ++i) out[i] /= total;
  return out;
}

/// Shannon entropy in nats; arguments must lie on the simplex.
inline double entropy5(const Vec5& w) {
  double h = 0.0;
  for (int i = 0; i < kRewardDim; ++i)
    if (w[i] > 0.0) h -= w[i] * std::log(w[i]);
  return h;
}

inline Vec5 uniform_pref() {
  Vec5 w{};
  w.fill(1.0 / kRewardDim);
  return w;
}

}  // namespace dpi
