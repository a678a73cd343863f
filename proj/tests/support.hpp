#pragma once

// Hand-rolled property generators. Every property test draws its cases from
// a seeded SplitMix64 stream, so a failure reproduces from the printed case.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "tailbounds/distributions.hpp"

namespace tbtest {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform_open(); }

  /// log-uniform on [lo, hi], lo > 0
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return lo + rng_.next() % (hi - lo + 1);
  }

  bool coin() { return (rng_.next() >> 63) != 0; }

 private:
  tailbounds::SplitMix64 rng_;
};

/// Relative distance with an absolute floor of 1 on the scale.
inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double strict_rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline std::string describe(double lambda, double mu) {
  return "lambda=" + std::to_string(lambda) + " mu=" + std::to_string(mu);
}

}  // namespace tbtest
