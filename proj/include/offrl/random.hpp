#pragma once

// Deterministic random number generation.
//
// The base generator is SplitMix64: the state is a 64-bit Weyl counter
// advanced by the golden-ratio increment and every output is a bijective
// mix of the counter. Draw k of a stream seeded with s is therefore
// mix(s + (k+1)·0x9E3779B97F4A7C15), independent of platform and standard
// library. All distributions below are implemented here, on top of that
// counter, so sample streams are bit-reproducible everywhere.

#include "offrl/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace offrl {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for substream `(a, b)` of `master`. Chains the mixer so that
/// distinct tuples give unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) {
  std::uint64_t h = mix64(master + kGoldenGamma);
  h = mix64(h ^ (a + 0x632BE59BD9B4E019ULL));
  h = mix64(h ^ (b + 0x8CB92BA72F3D8DD7ULL));
  return h;
}

/// SplitMix64; satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift; bias ≤ n/2^64, negligible for our n.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Standard normal by Box–Muller (one output per two uniforms, no caching).
inline double normal(Rng& rng) {
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Gamma(shape, 1) by Marsaglia–Tsang; shapes below one use the
/// Gamma(shape+1)·U^{1/shape} boost.
inline double gamma_variate(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw InvalidArgument("gamma shape must be positive");
  if (shape < 1.0) {
    const double g = gamma_variate(rng, shape + 1.0);
    return g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Beta(a, b) as X/(X+Y) with X ~ Gamma(a), Y ~ Gamma(b).
inline double beta_variate(Rng& rng, double a, double b) {
  const double x = gamma_variate(rng, a);
  const double y = gamma_variate(rng, b);
  const double s = x + y;
  // Both gammas can underflow to zero for tiny shapes.
  if (s <= 0.0) return rng.bernoulli(a / (a + b)) ? 1.0 : 0.0;
  return x / s;
}

/// Symmetric Dirichlet(concentration) on the k-simplex.
inline VecX dirichlet_variate(Rng& rng, Eigen::Index k, double concentration) {
  VecX g(k);
  for (Eigen::Index i = 0; i < k; ++i) g[i] = gamma_variate(rng, concentration);
  const double s = g.sum();
  if (s <= 0.0) {
    g.setZero();
    g[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(k)))] = 1.0;
    return g;
  }
  return g / s;
}

/// Geometric number of failures before the first success, support {0,1,...}.
inline std::uint64_t geometric_variate(Rng& rng, double success_prob) {
  if (success_prob >= 1.0) return 0;
  const double u = rng.uniform_open();
  return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-success_prob)));
}

/// Index drawn from a discrete distribution given by nonnegative weights
/// (inverse CDF; last index absorbs rounding).
template <typename Derived>
Eigen::Index categorical_variate(Rng& rng, const Eigen::DenseBase<Derived>& weights) {
  const double total = weights.sum();
  double u = rng.uniform() * total;
  const Eigen::Index k = weights.size();
  for (Eigen::Index i = 0; i < k; ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  for (Eigen::Index i = k - 1; i > 0; --i)
    if (weights[i] > 0.0) return i;
  return 0;
}

}  // namespace offrl
