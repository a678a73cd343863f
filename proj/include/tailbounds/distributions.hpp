#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tailbounds/errors.hpp"

namespace tailbounds {

/// Failure-count geometric law Pr[X = k] = p (1-p)^k, k = 0, 1, 2, ...
struct GeometricSpec {
  double mu = 1.0;  // mean (1-p)/p
  double p = 0.5;   // success probability 1/(1+mu)
};

/// Exponential law with density rho e^{-rho y}, mean mu = 1/rho.
struct ExponentialSpec {
  double mu = 1.0;
  double rho = 1.0;
};

using DistributionSpec = std::variant<GeometricSpec, ExponentialSpec>;

enum class Family { Geometric, Exponential };
enum class Parameter { Mean, SuccessProbability, Rate };
enum class Side { Upper, Lower };

constexpr std::string_view to_string(Family f) {
  return f == Family::Geometric ? "geometric" : "exponential";
}
constexpr std::string_view to_string(Side s) { return s == Side::Upper ? "upper" : "lower"; }

inline Family family_of(const DistributionSpec& spec) {
  return std::holds_alternative<GeometricSpec>(spec) ? Family::Geometric
                                                     : Family::Exponential;
}

inline double mean_of(const DistributionSpec& spec) {
  return std::visit([](const auto& s) { return s.mu; }, spec);
}

inline GeometricSpec geometric_from_mean(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError("geometric mean must be a positive finite real");
  }
  return {mu, 1.0 / (1.0 + mu)};
}

inline GeometricSpec geometric_from_success(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("geometric p must lie in (0, 1)");
  return {(1.0 - p) / p, p};
}

inline ExponentialSpec exponential_from_mean(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError("exponential mean must be a positive finite real");
  }
  return {mu, 1.0 / mu};
}

inline ExponentialSpec exponential_from_rate(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("exponential rate must be a positive finite real");
  }
  return {1.0 / rho, rho};
}

inline DistributionSpec make_spec(Family family, Parameter given, double value) {
  if (family == Family::Geometric) {
    switch (given) {
      case Parameter::Mean: return geometric_from_mean(value);
      case Parameter::SuccessProbability: return geometric_from_success(value);
      case Parameter::Rate: throw DomainError("rate parameter given for a geometric law");
    }
  } else {
    switch (given) {
      case Parameter::Mean: return exponential_from_mean(value);
      case Parameter::Rate: return exponential_from_rate(value);
      case Parameter::SuccessProbability:
        throw DomainError("success probability given for an exponential law");
    }
  }
  throw DomainError("make_spec: unknown parameter");
}

inline DistributionSpec make_spec(Family family, double mu) {
  return make_spec(family, Parameter::Mean, mu);
}

inline double density(const GeometricSpec& spec, std::int64_t k) {
  if (k < 0) throw DomainError("geometric pmf: k must be >= 0");
  // (1-p)^k = (mu/(1+mu))^k = exp(-k ln(1 + 1/mu))
  return spec.p * std::exp(-static_cast<double>(k) * std::log1p(1.0 / spec.mu));
}

inline double density(const ExponentialSpec& spec, double y) {
  if (!(y >= 0.0)) throw DomainError("exponential pdf: y must be >= 0");
  return spec.rho * std::exp(-spec.rho * y);
}

/// The event {mean of n draws >= lambda*mu} (Upper) or {<= lambda*mu} (Lower).
struct TailQuery {
  DistributionSpec dist = GeometricSpec{};
  std::uint64_t n = 1;
  double lambda = 1.0;
  Side side = Side::Upper;

  Family family() const { return family_of(dist); }
  double mu() const { return mean_of(dist); }
};

inline void validate(const TailQuery& q) {
  if (q.n < 1) throw DomainError("query: n must be >= 1");
  if (!(q.lambda > 0.0) || !std::isfinite(q.lambda)) {
    throw DomainError("query: lambda must be a positive finite real");
  }
  const double mu = q.mu();
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("query: mu must be positive");
}

inline TailQuery make_query(DistributionSpec dist, std::uint64_t n, double lambda, Side side) {
  TailQuery q{dist, n, lambda, side};
  validate(q);
  return q;
}

/// Side consistency: upper tails need lambda >= 1, lower tails lambda <= 1.
inline bool side_consistent(const TailQuery& q) {
  return q.side == Side::Upper ? q.lambda >= 1.0 : q.lambda <= 1.0;
}

/// SplitMix64 (Steele, Lea, Flood). The state advances by a fixed odd
/// increment, so output j of a stream seeded with s depends only on (s, j).
class SplitMix64 {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1): 53-bit grid shifted by half a step.
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t geometric_from_uniform(const GeometricSpec& spec, double u) {
  // floor(ln U / ln(1-p)), ln(1-p) = -ln(1 + 1/mu)
  return static_cast<std::uint64_t>(std::floor(-std::log(u) / std::log1p(1.0 / spec.mu)));
}

inline double exponential_from_uniform(const ExponentialSpec& spec, double u) {
  return -spec.mu * std::log(u);
}

/// Inverse-CDF draw from an existing generator.
inline double draw(const DistributionSpec& spec, SplitMix64& rng) {
  const double u = rng.uniform_open();
  if (const auto* g = std::get_if<GeometricSpec>(&spec)) {
    return static_cast<double>(geometric_from_uniform(*g, u));
  }
  return exponential_from_uniform(std::get<ExponentialSpec>(spec), u);
}

/// n inverse-CDF draws from the SplitMix64 stream seeded with `seed`.
/// Geometric draws are integer valued.
inline std::vector<double> sample(const DistributionSpec& spec, std::uint64_t n,
                                  std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  SplitMix64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(draw(spec, rng));
  return out;
}

}  // namespace tailbounds
