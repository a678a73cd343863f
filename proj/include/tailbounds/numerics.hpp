#pragma once

// Log-domain scalar primitives: factorials, binomial coefficients, stable
// summation. The factorial and Stirling routines are templated on the scalar
// so the same code runs in binary64 and in an extended-precision type when a
// check needs more resolution than a double offers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tailbounds/errors.hpp"

namespace tailbounds {

/// Largest m for which ln_factorial sums ln k term by term.
inline constexpr std::uint64_t kLnFactorialCap = 100'000'000;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Neumaier's variant of Kahan summation.
template <typename T = double>
class CompensatedSum {
 public:
  void add(const T& x) {
    using std::abs;
    const T t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  T value() const { return sum_ + carry_; }

  void scale(const T& factor) {
    sum_ *= factor;
    carry_ *= factor;
  }

 private:
  T sum_{0};
  T carry_{0};
};

namespace detail {

inline void check_factorial_budget(std::uint64_t m) {
  if (m > kLnFactorialCap) {
    throw BudgetExceeded("ln_factorial: m = " + std::to_string(m) +
                         " exceeds the exact-summation cap of " +
                         std::to_string(kLnFactorialCap));
  }
}

}  // namespace detail

/// ln(m!) as a compensated running sum of ln k, k = 2..m.
template <typename T = double>
T ln_factorial(std::uint64_t m) {
  using std::log;
  detail::check_factorial_budget(m);
  CompensatedSum<T> acc;
  for (std::uint64_t k = 2; k <= m; ++k) {
    acc.add(log(T(k)));
  }
  return acc.value();
}

/// ln(0!), ln(1!), ..., ln(m_max!) with the same accumulation as ln_factorial,
/// so entry m is bit-identical to ln_factorial<T>(m).
template <typename T = double>
std::vector<T> ln_factorial_sequence(std::uint64_t m_max) {
  using std::log;
  detail::check_factorial_budget(m_max);
  std::vector<T> out;
  out.reserve(m_max + 1);
  CompensatedSum<T> acc;
  out.push_back(acc.value());
  for (std::uint64_t k = 1; k <= m_max; ++k) {
    if (k >= 2) acc.add(log(T(k)));
    out.push_back(acc.value());
  }
  return out;
}

template <typename T = double>
struct StirlingBracket {
  std::uint64_t m = 1;
  T lower{};
  T upper{};

  bool contains(const T& value) const { return lower <= value && value <= upper; }
};

/// Robbins' two-sided Stirling bracket on ln(m!):
///   (m + 1/2) ln m - m + ln(2 pi)/2 + 1/(12m + 1)  <=  ln m!
///   ln m!  <=  (m + 1/2) ln m - m + ln(2 pi)/2 + 1/(12m)
template <typename T = double>
StirlingBracket<T> stirling_bounds(std::uint64_t m) {
  using std::acos;
  using std::log;
  if (m < 1) throw DomainError("stirling_bounds: m must be >= 1");
  const T mt(m);
  const T two_pi = 2 * acos(T(-1));
  const T base = (mt + T(0.5)) * log(mt) - mt + log(two_pi) / 2;
  return {m, base + 1 / (12 * mt + 1), base + 1 / (12 * mt)};
}

/// ln C(a, b). Evaluated as sum_{j=1..k} [ln(a-k+j) - ln j] over the shorter
/// index k = min(b, a-b), which equals ln a! - ln b! - ln (a-b)! without
/// cancelling two O(a ln a) magnitudes.
inline double ln_binomial(std::uint64_t a, std::uint64_t b) {
  if (b > a) {
    throw DomainError("ln_binomial: b = " + std::to_string(b) + " exceeds a = " +
                      std::to_string(a));
  }
  detail::check_factorial_budget(a);
  const std::uint64_t k = std::min(b, a - b);
  const std::uint64_t offset = a - k;
  CompensatedSum<double> acc;
  for (std::uint64_t j = 1; j <= k; ++j) {
    acc.add(std::log(static_cast<double>(offset + j)));
    acc.add(-std::log(static_cast<double>(j)));
  }
  return acc.value();
}

/// ln(1 - e^x) for x <= 0, switching between expm1 and log1p forms.
inline double log1mexp(double x) {
  if (x > 0.0) throw DomainError("log1mexp: argument must be <= 0");
  if (x == 0.0) return kNegInf;
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// Streaming ln(sum exp(term_i)). Rescales when a new maximum arrives, so the
/// terms never need to be stored.
class LogSumAccumulator {
 public:
  void add(double term) {
    if (term == kNegInf) return;
    if (std::isnan(term)) throw DomainError("log_sum_exp: NaN term");
    if (term > max_) {
      if (max_ != kNegInf) acc_.scale(std::exp(max_ - term));
      max_ = term;
      acc_.add(1.0);
    } else {
      acc_.add(std::exp(term - max_));
    }
  }

  double value() const {
    if (max_ == kNegInf) return kNegInf;
    if (std::isinf(max_)) return max_;
    return max_ + std::log(acc_.value());
  }

 private:
  double max_ = kNegInf;
  CompensatedSum<double> acc_;
};

/// ln(sum exp(term_i)); -inf when every term is -inf.
inline double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw DomainError("log_sum_exp: empty list");
  double max = kNegInf;
  for (double t : terms) {
    if (std::isnan(t)) throw DomainError("log_sum_exp: NaN term");
    max = std::max(max, t);
  }
  if (std::isinf(max)) return max;
  CompensatedSum<double> acc;
  for (double t : terms) acc.add(std::exp(t - max));
  return max + std::log(acc.value());
}

inline double log_sum_exp(std::initializer_list<double> terms) {
  return log_sum_exp(std::span<const double>(terms.begin(), terms.size()));
}

}  // namespace tailbounds
