#pragma once

// Large-deviation rate functions for sample means of geometric (H) and
// exponential (G) variables, their derivatives, closed-form lower
// approximations of H, and the slack constants of the matching lower bounds.

#include <algorithm>
#include <cmath>
#include <string>

#include "tailbounds/errors.hpp"

namespace tailbounds {

/// Below this |lambda - 1| the rate functions return their leading Taylor term.
inline constexpr double kRateTaylorCutoff = 1e-8;

namespace detail {

inline void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be a positive finite real");
  }
}

// ln(lambda) without losing digits when lambda is close to 1.
inline double log_ratio(double lambda) {
  const double d = lambda - 1.0;
  return std::abs(d) < 0.5 ? std::log1p(d) : std::log(lambda);
}

}  // namespace detail

/// Below this |lambda - 1| the rates are summed as power series in lambda - 1.
inline constexpr double kRateSeriesRadius = 0.5;

namespace detail {

// sum_{k >= 2} (-d)^k c_k / (k (k - 1)) for |d| <= 1/2 and 0 <= c_k <= k.
template <typename Coefficient>
double rate_series(double d, Coefficient coefficient) {
  double power = -d;  // (-d)^{k-1}
  double sum = 0.0;
  for (int k = 2; k < 200; ++k) {
    power *= -d;
    const double term = power * coefficient(k) / (k * (k - 1.0));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

/// H(lambda, mu) = mu lambda ln lambda - (1 + mu lambda) ln((1 + mu lambda)/(1 + mu)).
/// Near lambda = 1 the two terms cancel to O(d^2), d = lambda - 1, so there
/// H is summed as mu sum_k (-d)^k (1 - s^{k-1})/(k(k-1)), s = mu/(1 + mu).
/// Elsewhere a rearranged closed form is used for mu > 1.
inline double rate_H(double lambda, double mu) {
  detail::check_positive(lambda, "lambda");
  detail::check_positive(mu, "mu");
  const double d = lambda - 1.0;
  if (std::abs(d) < kRateTaylorCutoff) return mu * d * d / (2.0 * (1.0 + mu));
  if (std::abs(d) <= kRateSeriesRadius) {
    const double log_s = -std::log1p(1.0 / mu);
    return std::max(0.0, mu * detail::rate_series(d, [&](int k) {
      return -std::expm1((k - 1) * log_s);
    }));
  }
  const double a = mu * lambda;
  double value = 0.0;
  if (mu <= 1.0) {
    // (1 + mu lambda)/(1 + mu) = 1 + mu (lambda - 1)/(1 + mu)
    value = a * detail::log_ratio(lambda) - (1.0 + a) * std::log1p(mu * d / (1.0 + mu));
  } else {
    // Same value with O(1) terms for large mu:
    // -ln lambda - (1 + mu lambda) ln(1 + (1 - lambda)/(lambda (1 + mu)))
    value = -detail::log_ratio(lambda) - (1.0 + a) * std::log1p(-d / (lambda * (1.0 + mu)));
  }
  return std::max(0.0, value);
}

/// G(lambda) = lambda - 1 - ln lambda.
inline double rate_G(double lambda) {
  detail::check_positive(lambda, "lambda");
  const double d = lambda - 1.0;
  if (std::abs(d) < kRateTaylorCutoff) return 0.5 * d * d;
  // sum_k (-d)^k / k
  if (std::abs(d) <= kRateSeriesRadius) {
    return std::max(0.0, detail::rate_series(d, [](int k) { return k - 1.0; }));
  }
  return std::max(0.0, d - detail::log_ratio(lambda));
}

struct RateSplit {
  double h1 = 0.0;
  double h2 = 0.0;
};

/// H = H2 - H1 with
///   H1 = mu lambda ln(1 + 1/(mu lambda)) + ln(1 + mu lambda)
///   H2 = ln(1 + mu) + lambda mu ln(1 + 1/mu)
inline RateSplit rate_H1H2(double lambda, double mu) {
  detail::check_positive(lambda, "lambda");
  detail::check_positive(mu, "mu");
  const double a = mu * lambda;
  return {a * std::log1p(1.0 / a) + std::log1p(a), std::log1p(mu) + a * std::log1p(1.0 / mu)};
}

struct RateGradient {
  double d_lambda = 0.0;
  double d_mu = 0.0;
};

inline RateGradient grad_H(double lambda, double mu) {
  detail::check_positive(lambda, "lambda");
  detail::check_positive(mu, "mu");
  const double inv = 1.0 / lambda;
  return {
      -mu * std::log1p(-(1.0 - inv) / (1.0 + mu)),
      (1.0 - lambda) / (1.0 + mu) - lambda * std::log1p((inv - 1.0) / (1.0 + mu)),
  };
}

struct RateHessianDiag {
  double d2_lambda = 0.0;  // > 0
  double d2_mu = 0.0;      // <= 0, zero only at lambda = 1
};

inline RateHessianDiag hess_diag_H(double lambda, double mu) {
  detail::check_positive(lambda, "lambda");
  detail::check_positive(mu, "mu");
  const double d = lambda - 1.0;
  const double a = mu * lambda;
  return {mu / (lambda * (1.0 + a)), -(d * d) / ((1.0 + mu) * (1.0 + mu) * (1.0 + a))};
}

/// True when (lambda, mu) lies in the domain of approximation case 1..5.
inline bool in_approximation_domain(int which, double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0)) return false;
  switch (which) {
    case 1: return lambda <= 1.0;
    case 2: return lambda >= 1.0 && lambda <= 2.0;
    case 3: return lambda >= 2.0;
    case 4: return mu <= 1.0 / 3.0 && lambda >= 3.0;
    case 5: return mu >= 3.0 && lambda <= 1.0 / 3.0;
    default: return false;
  }
}

/// Closed-form lower approximation of H(lambda, mu), cases 1..5:
///   1  mu > 0, lambda in (0, 1]       mu/(2(1+mu)) (lambda-1)^2
///   2  mu > 0, lambda in [1, 2]       mu/(4(1+mu)) (lambda-1)^2
///   3  mu > 0, lambda >= 2            mu/(4(1+mu)) (lambda-1)
///   4  0 < mu <= 1/3, lambda >= 3     (mu lambda/4) ln min(lambda, 1/mu)
///   5  mu >= 3, 0 < lambda <= 1/3     (1/4) ln min(1/lambda, mu)
/// Points outside the chosen case's domain are rejected.
inline double prop_lower_bound(int which, double lambda, double mu) {
  detail::check_positive(lambda, "lambda");
  detail::check_positive(mu, "mu");
  if (which < 1 || which > 5) throw DomainError("approximation case must be 1..5");
  if (!in_approximation_domain(which, lambda, mu)) {
    throw DomainError("(lambda, mu) outside the domain of approximation case " +
                      std::to_string(which));
  }
  const double d = lambda - 1.0;
  switch (which) {
    case 1: return mu / (2.0 * (1.0 + mu)) * d * d;
    case 2: return mu / (4.0 * (1.0 + mu)) * d * d;
    case 3: return mu / (4.0 * (1.0 + mu)) * d;
    case 4: return mu * lambda / 4.0 * std::log(std::min(lambda, 1.0 / mu));
    default: return 0.25 * std::log(std::min(1.0 / lambda, mu));
  }
}

struct DeltaTerms {
  double upper = 0.0;  // 7/6 + ln(lambda + 2/mu)
  double lower = 0.0;  // 1/6 + (3/2) ln(1 + 1/(lambda mu))
};

inline DeltaTerms delta_terms(double lambda, double mu) {
  detail::check_positive(lambda, "lambda");
  detail::check_positive(mu, "mu");
  return {7.0 / 6.0 + std::log(lambda + 2.0 / mu),
          1.0 / 6.0 + 1.5 * std::log1p(1.0 / (lambda * mu))};
}

}  // namespace tailbounds
