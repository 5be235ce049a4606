#pragma once

// Seedable variate primitives for the Gibbs samplers.
//
// The generator is xoshiro256++ seeded through splitmix64, so streams are
// reproducible bit-for-bit from a 64-bit seed within one build of this
// library. No platform-default engines are used anywhere.

#include <cmath>
#include <cstdint>
#include <limits>

#include "blockgibbs/errors.hpp"

namespace blockgibbs {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1); never returns 0 so logs are safe.
  double next_uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

// Derives a child seed from a base seed and a tuple of stream labels.
// Used to give every (dataset, chain, sampler, prior) its own stream.
inline std::uint64_t derive_seed(std::uint64_t base_seed,
                                 std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0, std::uint64_t d = 0) {
  std::uint64_t s = base_seed;
  s ^= detail::splitmix64(a);
  s = detail::splitmix64(s) ^ detail::splitmix64(b);
  s = detail::splitmix64(s) ^ detail::splitmix64(c);
  s = detail::splitmix64(s) ^ detail::splitmix64(d);
  return detail::splitmix64(s);
}

// Standard normal via the Marsaglia polar method (the spare is discarded to
// keep the stream stateless between calls).
inline double draw_normal(RngStream& rng) {
  for (;;) {
    const double u = 2.0 * rng.next_uniform() - 1.0;
    const double v = 2.0 * rng.next_uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

inline double draw_exponential(RngStream& rng) {
  return -std::log(rng.next_uniform());
}

inline bool draw_bernoulli(double prob, RngStream& rng) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw InvalidParameter("bernoulli probability outside [0,1]");
  }
  return rng.next_uniform() < prob;
}

// Gamma(shape, rate) via Marsaglia-Tsang, with the power-of-uniform boost
// for shape < 1. Valid for every shape > 0.
inline double draw_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw InvalidParameter("gamma parameters must be positive");
  }
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(rng.next_uniform(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = draw_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return boost * d * v / rate;
    }
  }
}

// Inverse-Gamma(shape, scale) with density proportional to
// x^{-shape-1} exp(-scale/x); the reciprocal is Gamma(shape, rate = scale).
inline double draw_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw InvalidParameter("inverse-gamma parameters must be positive");
  }
  return 1.0 / draw_gamma(shape, scale, rng);
}

// Inverse-Gaussian(mean, shape) via the Michael-Schucany-Haas transform:
// one chi-square variate, one uniform for the root selection.
inline double draw_inverse_gaussian(double mean, double shape, RngStream& rng) {
  if (!(mean > 0.0) || !(shape > 0.0)) {
    throw InvalidParameter("inverse-gaussian parameters must be positive");
  }
  const double z = draw_normal(rng);
  const double nu = z * z;
  // Small root of the quadratic, written in the cancellation-free form
  // x = mean / (1 + c + sqrt(c(c + 2))) with c = mean*nu/(2*shape).
  const double c = mean * nu / (2.0 * shape);
  const double root_term = 1.0 + c + std::sqrt(c * (c + 2.0));
  const double x = mean / root_term;
  const double u = rng.next_uniform();
  if (u <= mean / (mean + x)) {
    return x;
  }
  return mean * root_term;  // mean^2 / x without overflow
}

// Student t with 2 degrees of freedom: normal over sqrt(chi^2_2 / 2).
inline double draw_student_t2(RngStream& rng) {
  const double z = draw_normal(rng);
  const double half_chi2 = draw_exponential(rng);  // chi^2_2 / 2 ~ Exp(1)
  return z / std::sqrt(half_chi2);
}

}  // namespace blockgibbs
