#pragma once

// Grid sweeps that check every tail inequality against the exact oracle, and
// certified evaluation of -ln Pr / (n rate) for the asymptotic-tightness claim.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tailbounds/bounds.hpp"
#include "tailbounds/distributions.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/exact.hpp"
#include "tailbounds/numerics.hpp"
#include "tailbounds/rates.hpp"

namespace tailbounds {

struct GridSpec {
  std::vector<double> mu_values;
  std::vector<double> lambda_values;
  std::vector<std::uint64_t> n_values;
  std::vector<Family> families;
  std::vector<Side> sides;
};

/// 13 log-spaced mu in [0.01, 100], 14 lambda covering every approximation
/// case boundary, n in {1, 2, 5, 10, 50, 200}, both laws and both sides.
inline GridSpec default_grid() {
  GridSpec g;
  for (int k = 0; k <= 12; ++k) g.mu_values.push_back(std::pow(10.0, -2.0 + k / 3.0));
  g.lambda_values = {0.05, 0.1, 0.2, 0.33, 0.5, 0.8, 0.95, 1.05, 1.25, 2, 3, 5, 10, 20};
  g.n_values = {1, 2, 5, 10, 50, 200};
  g.families = {Family::Geometric, Family::Exponential};
  g.sides = {Side::Upper, Side::Lower};
  return g;
}

inline void validate(const GridSpec& g) {
  if (g.mu_values.empty() || g.lambda_values.empty() || g.n_values.empty() ||
      g.families.empty() || g.sides.empty()) {
    throw DomainError("grid: every list must be nonempty");
  }
  for (double mu : g.mu_values) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("grid: mu values must be positive");
  }
  for (double l : g.lambda_values) {
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("grid: lambda values must be positive");
  }
  for (auto n : g.n_values) {
    if (n < 1) throw DomainError("grid: n values must be >= 1");
  }
}

enum class Suite { Theorem1, Proposition, Sandwich, Stirling, Comparisons, All };

constexpr std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::Theorem1: return "theorem1";
    case Suite::Proposition: return "proposition";
    case Suite::Sandwich: return "sandwich";
    case Suite::Stirling: return "stirling";
    case Suite::Comparisons: return "comparisons";
    case Suite::All: return "all";
  }
  return "?";
}

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::uint64_t kStirlingSweepMax = 100'000;

/// A point where lhs_log <= rhs_log failed by more than the tolerance.
struct Counterexample {
  TailQuery query;
  std::string suite;
  std::string check;
  double lhs_log = 0.0;
  double rhs_log = 0.0;
  double violation = 0.0;  // lhs_log - rhs_log
};

struct SuiteReport {
  std::string suite;
  std::string mode;
  double tolerance = kDefaultTolerance;
  std::uint64_t points_checked = 0;
  std::uint64_t skipped = 0;
  std::vector<Counterexample> counterexamples;
  double max_violation = 0.0;
};

namespace detail {

class SuiteRecorder {
 public:
  SuiteRecorder(Suite suite, CertificateMode mode, double tolerance) {
    report_.suite = std::string(to_string(suite));
    report_.mode = std::string(to_string(mode));
    report_.tolerance = tolerance;
  }

  /// Records the claim lhs <= rhs (log domain or exponents).
  void check(const TailQuery& q, std::string_view what, double lhs, double rhs) {
    const double gap = lhs - rhs;
    if (std::isnan(gap)) {
      // -inf <= -inf and similar degenerate comparisons hold trivially
      if (!(lhs <= rhs)) add(q, what, lhs, rhs, std::numeric_limits<double>::infinity());
      return;
    }
    report_.max_violation = std::max(report_.max_violation, gap);
    if (gap > report_.tolerance) add(q, what, lhs, rhs, gap);
  }

  void point() { ++report_.points_checked; }
  void skip() { ++report_.skipped; }

  SuiteReport take() { return std::move(report_); }

 private:
  void add(const TailQuery& q, std::string_view what, double lhs, double rhs, double gap) {
    report_.counterexamples.push_back({q, report_.suite, std::string(what), lhs, rhs, gap});
    report_.max_violation = std::max(report_.max_violation, gap);
  }

  SuiteReport report_;
};

template <typename Visit>
void for_each_grid_query(const GridSpec& g, Visit visit) {
  for (Family f : g.families) {
    for (Side s : g.sides) {
      for (double mu : g.mu_values) {
        for (double lambda : g.lambda_values) {
          for (std::uint64_t n : g.n_values) {
            visit(TailQuery{make_spec(f, mu), n, lambda, s});
          }
        }
      }
    }
  }
}

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> lin_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  out.back() = hi;
  return out;
}

struct CaseGrid {
  int which;
  std::vector<double> lambdas;  // 20 values
  std::vector<double> mus;      // 10 values
};

// 20 x 10 = 200 points inside each approximation case's domain.
inline std::array<CaseGrid, 5> approximation_case_grids() {
  const auto wide_mu = log_spaced(0.01, 100.0, 10);
  std::vector<double> case1;
  for (int j = 1; j <= 20; ++j) case1.push_back(j / 20.0);
  return {{
      {1, case1, wide_mu},
      {2, lin_spaced(1.0, 2.0, 20), wide_mu},
      {3, log_spaced(2.0, 1000.0, 20), wide_mu},
      {4, log_spaced(3.0, 1e4, 20), log_spaced(1e-3, 1.0 / 3.0, 10)},
      {5, log_spaced(1e-4, 1.0 / 3.0, 20), log_spaced(3.0, 1e4, 10)},
  }};
}

inline TailQuery rate_point(double lambda, double mu, std::uint64_t n = 1) {
  return TailQuery{GeometricSpec{mu, 1.0 / (1.0 + mu)}, n, lambda, Side::Upper};
}

inline void run_theorem1(const GridSpec& g, SuiteRecorder& rec) {
  for_each_grid_query(g, [&](const TailQuery& q) {
    if (!side_consistent(q)) return rec.skip();
    double exact = 0.0;
    try {
      exact = exact_tail(q).log_value;
    } catch (const BudgetExceeded&) {
      return rec.skip();
    }
    rec.point();
    rec.check(q, "exact <= theorem1", exact, thm1_bound(q).log_bound);
  });
}

inline void run_proposition(const GridSpec& g, SuiteRecorder& rec) {
  const auto check_point = [&](int which, double lambda, double mu) {
    rec.point();
    rec.check(rate_point(lambda, mu), "case " + std::to_string(which) + " <= H",
              prop_lower_bound(which, lambda, mu), rate_H(lambda, mu));
  };
  for (const CaseGrid& cg : approximation_case_grids()) {
    for (double mu : cg.mus) {
      for (double lambda : cg.lambdas) check_point(cg.which, lambda, mu);
    }
  }
  for (int which = 1; which <= 5; ++which) {
    for (double mu : g.mu_values) {
      for (double lambda : g.lambda_values) {
        if (in_approximation_domain(which, lambda, mu)) check_point(which, lambda, mu);
      }
    }
  }
}

inline void run_sandwich(const GridSpec& g, CertificateMode mode, SuiteRecorder& rec) {
  for_each_grid_query(g, [&](const TailQuery& q) {
    if (!side_consistent(q)) return rec.skip();
    double cert = 0.0;
    double exact = 0.0;
    try {
      cert = certificate_bound(q, mode).log_bound;
      exact = exact_tail(q).log_value;
    } catch (const PreconditionError&) {
      return rec.skip();
    } catch (const BudgetExceeded&) {
      return rec.skip();
    }
    rec.point();
    rec.check(q, "certificate <= exact", cert, exact);
    rec.check(q, "exact <= theorem1", exact, thm1_bound(q).log_bound);
  });
}

inline void run_stirling(SuiteRecorder& rec) {
  using Quad = boost::multiprecision::cpp_bin_float_quad;
  const std::vector<Quad> ln_fact = ln_factorial_sequence<Quad>(kStirlingSweepMax);
  for (std::uint64_t m = 1; m <= kStirlingSweepMax; ++m) {
    const StirlingBracket<Quad> b = stirling_bounds<Quad>(m);
    const TailQuery tag = rate_point(1.0, 1.0, m);
    rec.point();
    // Gaps are formed in quad precision; only the difference is narrowed.
    rec.check(tag, "stirling lower <= ln m!", 0.0, static_cast<double>(ln_fact[m] - b.lower));
    rec.check(tag, "ln m! <= stirling upper", 0.0, static_cast<double>(b.upper - ln_fact[m]));
  }
}

inline void run_comparisons(const GridSpec& g, SuiteRecorder& rec) {
  // Chernoff exponent dominates Janson's for small means.
  std::vector<std::pair<double, double>> small_mu;
  for (double mu : {0.001, 0.01, 0.1}) {
    for (double lambda : {0.2, 0.5, 2.0, 5.0, 10.0}) small_mu.emplace_back(lambda, mu);
  }
  for (double mu : g.mu_values) {
    if (mu > 0.1) continue;
    for (double lambda : g.lambda_values) small_mu.emplace_back(lambda, mu);
  }
  for (auto [lambda, mu] : small_mu) {
    rec.point();
    rec.check(rate_point(lambda, mu), "janson exponent <= H", janson_exponent(lambda, mu),
              rate_H(lambda, mu));
  }

  // For mu >= e^2 and lambda < e^-2 the Chernoff exponent beats Agrawal's.
  const double e2 = std::exp(2.0);
  for (double mu : g.mu_values) {
    for (double lambda : g.lambda_values) {
      if (!(mu >= e2 && lambda < 1.0 / e2)) continue;
      const TailQuery q{GeometricSpec{mu, 1.0 / (1.0 + mu)}, 1, lambda, Side::Lower};
      rec.point();
      rec.check(q, "agrawal exponent <= H", -agrawal_bound(q).log_bound, rate_H(lambda, mu));
    }
  }

  // The comparison bounds themselves must hold against the exact tail.
  GridSpec geo = g;
  geo.families = {Family::Geometric};
  for_each_grid_query(geo, [&](const TailQuery& q) {
    if (!side_consistent(q)) return rec.skip();
    double exact = 0.0;
    try {
      exact = exact_tail(q).log_value;
    } catch (const BudgetExceeded&) {
      return rec.skip();
    }
    rec.point();
    rec.check(q, "exact <= janson", exact, janson_bound(q).log_bound);
    const BoundReport agrawal = agrawal_bound(q);
    if (agrawal.applicable) rec.check(q, "exact <= agrawal", exact, agrawal.log_bound);
  });
}

}  // namespace detail

inline SuiteReport run_suite(Suite suite, const GridSpec& grid,
                             CertificateMode mode = CertificateMode::Repaired,
                             double tolerance = kDefaultTolerance) {
  validate(grid);
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  if (suite == Suite::All) {
    SuiteReport all;
    all.suite = std::string(to_string(Suite::All));
    all.mode = std::string(to_string(mode));
    all.tolerance = tolerance;
    for (Suite s : {Suite::Theorem1, Suite::Proposition, Suite::Sandwich, Suite::Stirling,
                    Suite::Comparisons}) {
      SuiteReport part = run_suite(s, grid, mode, tolerance);
      all.points_checked += part.points_checked;
      all.skipped += part.skipped;
      all.max_violation = std::max(all.max_violation, part.max_violation);
      for (auto& c : part.counterexamples) all.counterexamples.push_back(std::move(c));
    }
    return all;
  }
  detail::SuiteRecorder rec(suite, mode, tolerance);
  switch (suite) {
    case Suite::Theorem1: detail::run_theorem1(grid, rec); break;
    case Suite::Proposition: detail::run_proposition(grid, rec); break;
    case Suite::Sandwich: detail::run_sandwich(grid, mode, rec); break;
    case Suite::Stirling: detail::run_stirling(rec); break;
    case Suite::Comparisons: detail::run_comparisons(grid, rec); break;
    case Suite::All: break;
  }
  return rec.take();
}

struct AsymptoticRatio {
  double ratio = 0.0;          // -ln Pr / (n rate)
  double certified_max = 0.0;  // 1 + (ln(2 pi n)/2 + slack)/(n rate)
  double exact_log = 0.0;
  double n_times_rate = 0.0;
};

/// Places -ln Pr[tail] / (n rate) inside the interval certified by the
/// Chernoff bound (>= 1) and the repaired certificate (<= certified_max).
inline AsymptoticRatio asymptotic_ratio(const TailQuery& q) {
  validate(q);
  if (q.lambda == 1.0) throw DomainError("asymptotic_ratio: lambda must differ from 1");
  if (!side_consistent(q)) throw SideMismatch("asymptotic_ratio: " + detail::side_note(q));
  const double nd = static_cast<double>(q.n);
  double rate = 0.0;
  double slack = 0.0;
  if (q.family() == Family::Geometric) {
    rate = rate_H(q.lambda, q.mu());
    const DeltaTerms delta = delta_terms(q.lambda, q.mu());
    if (q.side == Side::Upper) {
      slack = delta.upper;
    } else {
      if (lower_threshold(q) < 1) {
        throw PreconditionError("asymptotic_ratio: geometric lower tail needs n >= 1/(lambda mu)");
      }
      slack = delta.lower;
    }
  } else {
    rate = rate_G(q.lambda);
    slack = 1.0 / (12.0 * nd) + (q.side == Side::Upper ? std::log(q.lambda) : 0.0);
  }
  const double exact = exact_tail(q).log_value;
  const double n_rate = nd * rate;
  return {-exact / n_rate,
          1.0 + (0.5 * std::log(2.0 * std::numbers::pi * nd) + slack) / n_rate, exact, n_rate};
}

}  // namespace tailbounds
