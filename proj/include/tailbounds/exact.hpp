#pragma once

// Ground-truth tail probabilities.
//
// Geometric: with S = X_1 + ... + X_n and q = 1/(1+mu),
//   {S >= T} = {fewer than n successes in T + n - 1 Bernoulli(q) trials}
//   {S <= F} = {at least n successes in F + n trials}
// with T = ceil(lambda n mu), F = floor(lambda n mu).
// Exponential: with N a Poisson variable of mean lambda n,
//   {mean >= lambda mu} = {N < n},  {mean <= lambda mu} = {N >= n}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "tailbounds/distributions.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/numerics.hpp"

namespace tailbounds {

struct LogProb {
  double log_value = 0.0;  // in [-inf, 0]

  double probability() const { return std::exp(log_value); }
};

/// Most terms the shorter counting sum may have.
inline constexpr std::uint64_t kExactTermBudget = 10'000'000;
/// Distance within which lambda n mu is treated as an integer.
inline constexpr double kThresholdSnap = 1e-9;

namespace detail {

// A walk stops once the remaining mass is provably below e^-40 of the sum.
inline constexpr double kTruncationMargin = 40.0;
inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

inline double threshold_value(const TailQuery& q) {
  return q.lambda * static_cast<double>(q.n) * q.mu();
}

inline double snap(double x) {
  const double r = std::nearbyint(x);
  return std::abs(x - r) <= kThresholdSnap ? r : x;
}

inline std::uint64_t to_count(double x) {
  if (!(x < 0x1.0p53)) throw BudgetExceeded("threshold lambda n mu exceeds 2^53");
  return static_cast<std::uint64_t>(x);
}

inline void charge(std::uint64_t& summed) {
  if (++summed > kExactTermBudget) {
    throw BudgetExceeded("exact tail: summation exceeded " + std::to_string(kExactTermBudget) +
                         " terms");
  }
}

// Sum of Binomial(M, q) log-pmf terms over k in [anchor, end] (upward) or
// [end, anchor] (downward), walking away from the anchor. The pmf is
// unimodal, so once terms decrease the remaining mass is at most
// (remaining count) * (current term).
inline double binomial_walk(std::uint64_t trials, double log_q, double log_1mq,
                            std::uint64_t anchor, std::uint64_t end, bool upward) {
  const std::uint64_t count = (upward ? end - anchor : anchor - end) + 1;
  const double m = static_cast<double>(trials);
  CompensatedSum<double> log_coef;
  log_coef.add(ln_binomial(trials, anchor));
  LogSumAccumulator acc;
  std::uint64_t summed = 0;
  double prev = kNegInf;
  std::uint64_t k = anchor;
  for (;;) {
    const double kd = static_cast<double>(k);
    const double term = log_coef.value() + kd * log_q + (m - kd) * log_1mq;
    acc.add(term);
    charge(summed);
    if (k == end) break;
    const double remaining = static_cast<double>(count - summed);
    if (term < prev && term + std::log(remaining) < acc.value() - kTruncationMargin) break;
    prev = term;
    if (upward) {
      log_coef.add(std::log(m - kd));
      log_coef.add(-std::log(kd + 1.0));
      ++k;
    } else {
      log_coef.add(std::log(kd));
      log_coef.add(-std::log(m - kd + 1.0));
      --k;
    }
  }
  return acc.value();
}

// Sum of Poisson(nu) log-pmf terms from the anchor: downward to k = 0, or
// upward without end.
inline double poisson_walk(double nu, std::uint64_t anchor, bool upward) {
  const double log_nu = std::log(nu);
  CompensatedSum<double> log_term;
  log_term.add(static_cast<double>(anchor) * log_nu);
  log_term.add(-ln_factorial(anchor));
  log_term.add(-nu);
  LogSumAccumulator acc;
  std::uint64_t summed = 0;
  double prev = kNegInf;
  std::uint64_t k = anchor;
  for (;;) {
    const double term = log_term.value();
    const double kd = static_cast<double>(k);
    acc.add(term);
    charge(summed);
    if (!upward && k == 0) break;
    if (term < prev) {
      // Upward, the term ratios nu/(j+1) shrink, so the rest is dominated by a
      // geometric series. Downward, k terms remain, each below this one.
      const double r = nu / (kd + 1.0);
      const double rest = upward ? (r < 1.0 ? term + std::log(r / (1.0 - r))
                                            : std::numeric_limits<double>::infinity())
                                 : term + std::log(kd);
      if (rest < acc.value() - kTruncationMargin) break;
    }
    prev = term;
    if (upward) {
      log_term.add(log_nu);
      log_term.add(-std::log(kd + 1.0));
      ++k;
    } else {
      log_term.add(-log_nu);
      log_term.add(std::log(kd));
      --k;
    }
  }
  return acc.value();
}

// Sum the target side directly when it is no longer than its complement.
// Otherwise sum the complement and take ln(1 - e^c) when that is well
// conditioned (c <= -ln 2); if not, fall back to the target side.
template <typename TargetSum, typename ComplementSum>
double shorter_side(std::uint64_t target_len, std::uint64_t complement_len, TargetSum target,
                    ComplementSum complement) {
  if (target_len == 0) return kNegInf;
  if (complement_len == 0) return 0.0;
  if (std::min(target_len, complement_len) > kExactTermBudget) {
    throw BudgetExceeded("exact tail: shorter counting sum has more than " +
                         std::to_string(kExactTermBudget) + " terms");
  }
  if (target_len <= complement_len) return std::min(0.0, target());
  const double c = complement();
  if (c <= -std::numbers::ln2) return log1mexp(std::min(0.0, c));
  return std::min(0.0, target());
}

}  // namespace detail

/// ceil(lambda n mu) after snapping values within 1e-9 of an integer.
inline std::uint64_t upper_threshold(const TailQuery& q) {
  return detail::to_count(std::ceil(detail::snap(detail::threshold_value(q))));
}

/// floor(lambda n mu) after snapping values within 1e-9 of an integer.
inline std::uint64_t lower_threshold(const TailQuery& q) {
  return detail::to_count(std::floor(detail::snap(detail::threshold_value(q))));
}

/// ln Pr[Z < n] for Z ~ Binomial(trials, 1/(1+mu)), summed directly.
inline double log_binomial_below(std::uint64_t trials, std::uint64_t n, double mu) {
  if (n == 0) return kNegInf;
  const std::uint64_t hi = std::min(n - 1, trials);
  return detail::binomial_walk(trials, -std::log1p(mu), -std::log1p(1.0 / mu), hi, 0, false);
}

/// ln Pr[Z >= n] for Z ~ Binomial(trials, 1/(1+mu)), summed directly.
inline double log_binomial_at_least(std::uint64_t trials, std::uint64_t n, double mu) {
  if (n > trials) return kNegInf;
  return detail::binomial_walk(trials, -std::log1p(mu), -std::log1p(1.0 / mu), n, trials, true);
}

inline LogProb exact_tail(const TailQuery& q) {
  validate(q);
  const std::uint64_t n = q.n;

  if (q.family() == Family::Geometric) {
    const double mu = q.mu();
    std::uint64_t trials = 0;
    if (q.side == Side::Upper) {
      trials = upper_threshold(q) + n - 1;  // event: Z < n
    } else {
      trials = lower_threshold(q) + n;  // event: Z >= n
    }
    detail::check_factorial_budget(trials);
    const std::uint64_t below_len = std::min(n, trials + 1);
    const std::uint64_t at_least_len = trials + 1 - below_len;
    const auto below = [&] { return log_binomial_below(trials, n, mu); };
    const auto at_least = [&] { return log_binomial_at_least(trials, n, mu); };
    if (q.side == Side::Upper) {
      return {detail::shorter_side(below_len, at_least_len, below, at_least)};
    }
    return {detail::shorter_side(at_least_len, below_len, at_least, below)};
  }

  const double nu = q.lambda * static_cast<double>(n);
  const auto fewer = [&] { return detail::poisson_walk(nu, n - 1, false); };
  const auto at_least = [&] { return detail::poisson_walk(nu, n, true); };
  if (q.side == Side::Upper) {
    return {detail::shorter_side(n, detail::kUnbounded, fewer, at_least)};
  }
  return {detail::shorter_side(detail::kUnbounded, n, at_least, fewer)};
}

/// Independent oracle for n <= 6, computed in probability domain.
/// Geometric: n-fold convolution of the pmf with support truncated once the
/// per-variable residual drops below 1e-15 relative to the threshold mass.
/// Exponential: Erlang survival by repeated integration by parts.
inline LogProb brute_force_tail(const TailQuery& q) {
  validate(q);
  if (q.n > 6) throw BudgetExceeded("brute_force_tail: n must be <= 6");
  const std::uint64_t n = q.n;

  if (const auto* g = std::get_if<GeometricSpec>(&q.dist)) {
    const double log_fail = -std::log1p(1.0 / g->mu);  // ln(1 - p)
    const std::uint64_t edge =
        q.side == Side::Upper ? upper_threshold(q) : lower_threshold(q);
    const auto support =
        static_cast<std::uint64_t>(std::ceil(std::log(1e-15) / log_fail)) + edge + 1;
    if (support * n > 10'000'000) throw BudgetExceeded("brute_force_tail: support too large");

    std::vector<double> single(support);
    for (std::uint64_t k = 0; k < support; ++k) {
      single[k] = g->p * std::exp(static_cast<double>(k) * log_fail);
    }
    std::vector<double> dist = single;
    for (std::uint64_t i = 1; i < n; ++i) {
      std::vector<double> next(dist.size() + support - 1, 0.0);
      for (std::size_t a = 0; a < dist.size(); ++a) {
        for (std::size_t b = 0; b < support; ++b) next[a + b] += dist[a] * single[b];
      }
      dist = std::move(next);
    }
    double mass = 0.0;
    if (q.side == Side::Upper) {
      for (std::size_t s = edge; s < dist.size(); ++s) mass += dist[s];
    } else {
      for (std::size_t s = 0; s <= edge && s < dist.size(); ++s) mass += dist[s];
    }
    return {std::log(mass)};
  }

  // Sum/mu ~ Gamma(n, 1); the threshold is x = lambda n.
  const double x = q.lambda * static_cast<double>(n);
  if (q.side == Side::Upper) {
    // int_x^inf t^{k-1} e^{-t}/(k-1)! dt = x^{k-1} e^{-x}/(k-1)! + (same with k-1)
    double term = std::exp(-x);
    double survival = term;
    for (std::uint64_t k = 1; k < n; ++k) {
      term *= x / static_cast<double>(k);
      survival += term;
    }
    return {std::log(survival)};
  }
  // int_0^x t^{n-1} e^{-t}/(n-1)! dt = sum_{k >= n} x^k e^{-x}/k!
  double term = std::exp(-x);
  for (std::uint64_t k = 1; k <= n; ++k) term *= x / static_cast<double>(k);
  double cdf = 0.0;
  for (std::uint64_t k = n; term > 1e-18 * cdf || k < n + 2; ++k) {
    cdf += term;
    term *= x / static_cast<double>(k + 1);
  }
  return {std::log(cdf)};
}

inline constexpr std::uint64_t kMcChunkTrials = 65'536;
inline constexpr std::string_view kMcGeneratorId = "splitmix64-chunk65536";

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string generator_id;
};

namespace detail {

inline std::uint64_t mc_chunk_hits(const TailQuery& q, std::uint64_t chunk_seed,
                                   std::uint64_t trials) {
  SplitMix64 rng(chunk_seed);
  std::uint64_t hits = 0;
  if (q.family() == Family::Geometric) {
    const bool upper = q.side == Side::Upper;
    const double edge =
        static_cast<double>(upper ? upper_threshold(q) : lower_threshold(q));
    for (std::uint64_t t = 0; t < trials; ++t) {
      double sum = 0.0;
      for (std::uint64_t i = 0; i < q.n; ++i) sum += draw(q.dist, rng);
      hits += upper ? (sum >= edge) : (sum <= edge);
    }
  } else {
    const double edge = threshold_value(q);
    const bool upper = q.side == Side::Upper;
    for (std::uint64_t t = 0; t < trials; ++t) {
      double sum = 0.0;
      for (std::uint64_t i = 0; i < q.n; ++i) sum += draw(q.dist, rng);
      hits += upper ? (sum >= edge) : (sum <= edge);
    }
  }
  return hits;
}

}  // namespace detail

/// Fraction of simulated trials whose n-draw mean lies in the query's tail.
/// Trials are split into fixed chunks; chunk c draws from the stream seeded
/// with seed + c, so the result does not depend on `threads`.
inline McEstimate mc_tail(const TailQuery& q, std::uint64_t trials, std::uint64_t seed,
                          unsigned threads = 1) {
  validate(q);
  if (trials < 1) throw DomainError("mc_tail: trials must be >= 1");
  const std::uint64_t chunks = (trials + kMcChunkTrials - 1) / kMcChunkTrials;
  std::vector<std::uint64_t> hits(chunks, 0);
  const auto run = [&](std::uint64_t first, std::uint64_t stride) {
    for (std::uint64_t c = first; c < chunks; c += stride) {
      const std::uint64_t size = std::min(kMcChunkTrials, trials - c * kMcChunkTrials);
      hits[c] = detail::mc_chunk_hits(q, seed + c, size);
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), chunks));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double est = static_cast<double>(total) / static_cast<double>(trials);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(trials)), trials, seed,
          std::string(kMcGeneratorId)};
}

}  // namespace tailbounds
