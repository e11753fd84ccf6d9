#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace dyncomm {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent stream seeds from (seed, a, b).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// log of a Gamma(shape, 1) variate. Shapes below 1 use the boost
/// G(a) = G(a+1) * U^(1/a), carried out in log space so tiny shapes never
/// underflow to an exact zero.
inline double log_gamma_variate(double shape, Rng& rng) {
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(rng));
  }
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  return std::log(g(rng)) + std::log(u) / shape;
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

/// Draws a Dirichlet(concentration) vector and returns its element-wise log.
inline std::vector<double> sample_log_dirichlet(std::span<const double> concentration, Rng& rng) {
  std::vector<double> out(concentration.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_gamma_variate(concentration[i], rng);
  const double z = log_sum_exp(out);
  for (double& x : out) x -= z;
  return out;
}

/// Index drawn with probability proportional to exp(log_w[k]). Returns
/// `log_w.size()` when every weight is zero.
inline std::size_t sample_log_categorical(std::span<const double> log_w, Rng& rng) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : log_w) hi = std::max(hi, x);
  if (!(hi > -std::numeric_limits<double>::infinity())) return log_w.size();
  double total = 0.0;
  for (double x : log_w) total += std::exp(x - hi);
  double r = uniform01(rng) * total;
  std::size_t last_positive = log_w.size();
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    const double w = std::exp(log_w[k] - hi);
    if (w > 0.0) last_positive = k;
    r -= w;
    if (r < 0.0) return k;
  }
  return last_positive;
}

}  // namespace dyncomm
