#pragma once

// Chernoff exponent curves for the three optimized families:
//   GeomUpper  f(t) = lambda mu t + ln[(1 + mu) - mu e^t],     0 < t < ln(1 + 1/mu)
//   GeomLower  g(t) = lambda mu t - ln[(1 + mu) - mu e^{-t}],  t > 0
//   ExpUpper   h(t) = lambda mu t + ln(1 - mu t),              0 < t < 1/mu
// f and h are concave with a single interior maximum; g is convex with a
// single interior minimum.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

#include "tailbounds/distributions.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/rates.hpp"

namespace tailbounds {

enum class CurveFamily { GeomUpper, GeomLower, ExpUpper };

constexpr std::string_view to_string(CurveFamily f) {
  switch (f) {
    case CurveFamily::GeomUpper: return "geom-upper";
    case CurveFamily::GeomLower: return "geom-lower";
    case CurveFamily::ExpUpper: return "exp-upper";
  }
  return "?";
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains_open(double t) const { return t > lo && t < hi; }
};

struct ExponentCurve {
  CurveFamily family = CurveFamily::GeomUpper;
  double lambda = 1.0;
  double mu = 1.0;

  /// Open interval of admissible t.
  Interval domain() const {
    switch (family) {
      case CurveFamily::GeomUpper: return {0.0, std::log1p(1.0 / mu)};
      case CurveFamily::GeomLower: return {0.0, std::numeric_limits<double>::infinity()};
      case CurveFamily::ExpUpper: return {0.0, 1.0 / mu};
    }
    return {};
  }

  /// f and h are maximized, g is minimized.
  bool maximized() const { return family != CurveFamily::GeomLower; }
};

inline ExponentCurve make_curve(CurveFamily family, double lambda, double mu) {
  detail::check_positive(lambda, "lambda");
  detail::check_positive(mu, "mu");
  return {family, lambda, mu};
}

inline double exponent(const ExponentCurve& curve, double t) {
  if (!curve.domain().contains_open(t)) {
    throw DomainError("exponent: t = " + std::to_string(t) + " outside the open domain of " +
                      std::string(to_string(curve.family)));
  }
  const double lm = curve.lambda * curve.mu;
  switch (curve.family) {
    // (1 + mu) - mu e^t = 1 - mu (e^t - 1)
    case CurveFamily::GeomUpper: return lm * t + std::log1p(-curve.mu * std::expm1(t));
    case CurveFamily::GeomLower: return lm * t - std::log1p(-curve.mu * std::expm1(-t));
    case CurveFamily::ExpUpper: return lm * t + std::log1p(-curve.mu * t);
  }
  return 0.0;
}

/// d/dt of exponent(curve, t); no domain check.
inline double exponent_slope(const ExponentCurve& curve, double t) {
  const double lm = curve.lambda * curve.mu;
  const double mu = curve.mu;
  switch (curve.family) {
    case CurveFamily::GeomUpper: return lm - mu * std::exp(t) / (1.0 - mu * std::expm1(t));
    case CurveFamily::GeomLower: return lm - mu * std::exp(-t) / (1.0 - mu * std::expm1(-t));
    case CurveFamily::ExpUpper: return lm - mu / (1.0 - mu * t);
  }
  return 0.0;
}

enum class OptimumMethod { ClosedForm, Numeric };

constexpr std::string_view to_string(OptimumMethod m) {
  return m == OptimumMethod::ClosedForm ? "closed-form" : "numeric";
}

struct OptimumReport {
  double t_star = 0.0;
  double value = 0.0;  // exponent(curve, t_star): f(T1) = H, g(T2) = -H, h(T3) = G
  double rate = 0.0;   // nonnegative bound exponent, H or G
  OptimumMethod method = OptimumMethod::ClosedForm;
  std::uint64_t iterations = 0;
};

namespace detail {

inline void check_curve_side(const ExponentCurve& curve) {
  const bool ok = curve.family == CurveFamily::GeomLower ? (curve.lambda < 1.0)
                                                         : (curve.lambda > 1.0);
  if (!ok) {
    throw SideMismatch(std::string(to_string(curve.family)) + " requires lambda " +
                       (curve.family == CurveFamily::GeomLower ? "in (0, 1)" : "> 1") +
                       ", got " + std::to_string(curve.lambda));
  }
}

inline OptimumReport report_at(const ExponentCurve& curve, double t, OptimumMethod method,
                               std::uint64_t iterations) {
  const double value = exponent(curve, t);
  return {t, value, curve.maximized() ? value : -value, method, iterations};
}

}  // namespace detail

/// T1 = ln((1 + 1/mu)/(1 + 1/(mu lambda))), T2 = -T1, T3 = (1 - 1/lambda)/mu.
inline OptimumReport closed_form_optimum(const ExponentCurve& curve) {
  detail::check_curve_side(curve);
  const double mu = curve.mu;
  const double lambda = curve.lambda;
  double t = 0.0;
  switch (curve.family) {
    case CurveFamily::GeomUpper:
      t = std::log1p(1.0 / mu) - std::log1p(1.0 / (mu * lambda));
      break;
    case CurveFamily::GeomLower:
      t = std::log1p(1.0 / (mu * lambda)) - std::log1p(1.0 / mu);
      break;
    case CurveFamily::ExpUpper:
      t = (1.0 - 1.0 / lambda) / mu;
      break;
  }
  return detail::report_at(curve, t, OptimumMethod::ClosedForm, 0);
}

inline constexpr std::uint64_t kOptimizerIterationCap = 10'000;
inline constexpr double kOptimizerEdge = 1e-12;

/// Bisection on the sign of the slope, which is monotone on the domain.
/// Bounded domains are bracketed by [eps w, (1 - eps) w]; the unbounded
/// GeomLower domain doubles the right end from t = 1 until the slope turns
/// positive. Iterations count both bracketing and bisection steps.
inline OptimumReport numeric_optimum(const ExponentCurve& curve, double tolerance) {
  detail::check_curve_side(curve);
  if (!(tolerance > 0.0)) throw DomainError("numeric_optimum: tolerance must be > 0");

  // True while t lies left of the optimum.
  const auto toward_optimum = [&](double t) {
    const double s = exponent_slope(curve, t);
    return curve.maximized() ? s > 0.0 : s < 0.0;
  };

  std::uint64_t iterations = 0;
  const auto tick = [&] {
    if (++iterations > kOptimizerIterationCap) {
      throw NonConvergence("numeric_optimum: iteration cap reached before the bracket "
                           "shrank below the tolerance");
    }
  };

  double lo = 0.0;
  double hi = 0.0;
  const Interval dom = curve.domain();
  if (std::isfinite(dom.hi)) {
    const double width = dom.hi - dom.lo;
    lo = dom.lo + kOptimizerEdge * width;
    hi = dom.hi - kOptimizerEdge * width;
  } else {
    lo = kOptimizerEdge;
    hi = 1.0;
    while (toward_optimum(hi)) {
      tick();
      lo = hi;
      hi *= 2.0;
    }
  }
  if (!toward_optimum(lo) || toward_optimum(hi)) {
    throw NonConvergence("numeric_optimum: optimum not bracketed inside the domain");
  }

  while (hi - lo > tolerance) {
    tick();
    const double mid = 0.5 * (lo + hi);
    if (toward_optimum(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return detail::report_at(curve, 0.5 * (lo + hi), OptimumMethod::Numeric, iterations);
}

/// E[e^{tX}] = 1/[(1 + mu) - mu e^t] (geometric, t < ln(1 + 1/mu));
/// E[e^{tY}] = 1/(1 - mu t) (exponential, t < 1/mu).
inline double mgf(const DistributionSpec& spec, double t) {
  if (const auto* g = std::get_if<GeometricSpec>(&spec)) {
    if (!(t < std::log1p(1.0 / g->mu))) {
      throw DomainError("mgf: t at or beyond the geometric convergence boundary ln(1 + 1/mu)");
    }
    return 1.0 / (1.0 - g->mu * std::expm1(t));
  }
  const double mu = std::get<ExponentialSpec>(spec).mu;
  if (!(t < 1.0 / mu)) {
    throw DomainError("mgf: t at or beyond the exponential convergence boundary 1/mu");
  }
  return 1.0 / (1.0 - mu * t);
}

}  // namespace tailbounds
