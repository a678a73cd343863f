#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "tailbounds/distributions.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/exact.hpp"
#include "tailbounds/rates.hpp"

namespace tailbounds {

enum class Method {
  Theorem1,
  CertificatePaper,
  CertificateRepaired,
  Janson,
  JansonQuadratic,
  Agrawal,
};

enum class Direction { UpperBoundsTail, LowerBoundsTail };

/// PaperLiteral keeps the literal certificate expressions.
/// Repaired adds ln(lambda) to the exponential upper-tail certificate.
enum class CertificateMode { PaperLiteral, Repaired };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::Theorem1: return "theorem1";
    case Method::CertificatePaper: return "certificate-paper";
    case Method::CertificateRepaired: return "certificate-repaired";
    case Method::Janson: return "janson";
    case Method::JansonQuadratic: return "janson-quadratic";
    case Method::Agrawal: return "agrawal";
  }
  return "?";
}

constexpr std::string_view to_string(Direction d) {
  return d == Direction::UpperBoundsTail ? "upper-bounds-tail" : "lower-bounds-tail";
}

constexpr std::string_view to_string(CertificateMode m) {
  return m == CertificateMode::PaperLiteral ? "paper" : "repaired";
}

struct BoundReport {
  Method method = Method::Theorem1;
  double log_bound = 0.0;
  Direction direction = Direction::UpperBoundsTail;
  bool applicable = true;
  std::string notes;

  double bound() const { return std::exp(log_bound); }
};

namespace detail {

inline BoundReport upper_report(Method m, const TailQuery& q, double exponent_per_sample,
                                std::string notes = {}) {
  // + 0.0 turns -0 into 0 when the exponent vanishes.
  return {m, -static_cast<double>(q.n) * exponent_per_sample + 0.0, Direction::UpperBoundsTail,
          true, std::move(notes)};
}

inline BoundReport inapplicable(Method m, Direction d, std::string notes) {
  // Trivial bounds: 1 from above, 0 from below.
  return {m, d == Direction::UpperBoundsTail ? 0.0 : kNegInf, d, false, std::move(notes)};
}

inline std::string side_note(const TailQuery& q) {
  return "side mismatch: " + std::string(to_string(q.side)) + " tail with lambda = " +
         std::to_string(q.lambda);
}

inline void require_geometric(const TailQuery& q, const char* who) {
  if (q.family() != Family::Geometric) {
    throw DomainError(std::string(who) + " applies to geometric sums only");
  }
}

}  // namespace detail

/// Chernoff bound exp{-n H(lambda, mu)} (geometric) or exp{-n G(lambda)}
/// (exponential), on either side.
inline BoundReport thm1_bound(const TailQuery& q) {
  validate(q);
  if (!side_consistent(q)) {
    return detail::inapplicable(Method::Theorem1, Direction::UpperBoundsTail, detail::side_note(q));
  }
  const double rate =
      q.family() == Family::Geometric ? rate_H(q.lambda, q.mu()) : rate_G(q.lambda);
  return detail::upper_report(Method::Theorem1, q, rate);
}

/// Lower bound on the exact tail matching thm1_bound up to O(ln n) in the
/// exponent:
///   geometric upper  exp{-[n H + ln(2 pi n)/2 + Delta_U]}
///   geometric lower  exp{-[n H + ln(2 pi n)/2 + Delta_L]},  n >= 1/(lambda mu)
///   exponential      exp{-[n G + ln(2 pi n)/2 + 1/(12 n)]}
/// In Repaired mode the exponential upper tail also subtracts ln lambda, the
/// price of keeping e^{-lambda n} in the k = n-1 Poisson term.
inline BoundReport certificate_bound(const TailQuery& q,
                                     CertificateMode mode = CertificateMode::Repaired) {
  validate(q);
  if (!side_consistent(q)) throw SideMismatch("certificate: " + detail::side_note(q));

  const double nd = static_cast<double>(q.n);
  const double stirling = 0.5 * std::log(2.0 * std::numbers::pi * nd);
  const Method method =
      mode == CertificateMode::PaperLiteral ? Method::CertificatePaper : Method::CertificateRepaired;
  std::string notes;
  double exponent = 0.0;

  if (q.family() == Family::Geometric) {
    const double mu = q.mu();
    const DeltaTerms delta = delta_terms(q.lambda, mu);
    if (q.side == Side::Upper) {
      exponent = nd * rate_H(q.lambda, mu) + stirling + delta.upper;
    } else {
      if (lower_threshold(q) < 1) {
        throw PreconditionError("certificate: geometric lower tail needs n >= 1/(lambda mu)");
      }
      exponent = nd * rate_H(q.lambda, mu) + stirling + delta.lower;
    }
  } else {
    exponent = nd * rate_G(q.lambda) + stirling + 1.0 / (12.0 * nd);
    if (q.side == Side::Upper) {
      if (mode == CertificateMode::Repaired) {
        exponent += std::log(q.lambda);
      } else {
        notes = "literal statement; can exceed the exact tail for small n";
      }
    }
  }
  return {method, -exponent, Direction::LowerBoundsTail, true, std::move(notes)};
}

/// Per-sample exponent z - ln(1 + z), z = (lambda - 1)(1 - p), of the
/// Janson bound translated to the failure-count convention.
inline double janson_exponent(double lambda, double mu) {
  const double z = (lambda - 1.0) * mu / (1.0 + mu);
  return z - std::log1p(z);
}

/// mu^2 (lambda - 1)^2 / (2 (1 + mu)^2), the z^2/2 relaxation of the Janson
/// exponent. Dominates it only for lambda >= 1 (z >= 0).
inline double janson_quadratic(const TailQuery& q) {
  validate(q);
  detail::require_geometric(q, "janson_quadratic");
  const double mu = q.mu();
  const double z = (q.lambda - 1.0) * mu / (1.0 + mu);
  return 0.5 * z * z;
}

inline BoundReport janson_bound(const TailQuery& q) {
  validate(q);
  detail::require_geometric(q, "janson_bound");
  if (!side_consistent(q)) {
    return detail::inapplicable(Method::Janson, Direction::UpperBoundsTail, detail::side_note(q));
  }
  return detail::upper_report(Method::Janson, q, janson_exponent(q.lambda, q.mu()));
}

/// Agrawal et al. geometric bounds with delta = |lambda - 1|:
///   upper, mu <= 1:             mu delta^2 / (2 (1+delta) (1+mu)^2)
///   upper, mu >= 1, delta < 1:  mu^2 delta^2 / (6 (1+mu)^2) (3 - 2 delta mu/(1+mu))
///   lower, mu <= 1:             mu delta^2 / (6 (1+mu)^2) (3 - 2 delta mu/(1+mu))
///   lower, mu >= 1:             mu^2 delta^2 / (2 (1+mu)^2)
/// The upper case mu > 1, delta >= 1 is not covered.
inline BoundReport agrawal_bound(const TailQuery& q) {
  validate(q);
  detail::require_geometric(q, "agrawal_bound");
  if (!side_consistent(q)) {
    return detail::inapplicable(Method::Agrawal, Direction::UpperBoundsTail, detail::side_note(q));
  }
  const double mu = q.mu();
  const double delta = q.side == Side::Upper ? q.lambda - 1.0 : 1.0 - q.lambda;
  if (delta == 0.0) return detail::upper_report(Method::Agrawal, q, 0.0, "delta = 0");

  const double s = (1.0 + mu) * (1.0 + mu);
  const double cubic = 3.0 - 2.0 * delta * mu / (1.0 + mu);
  double small_mu = -1.0;  // negative: case not applicable
  double large_mu = -1.0;
  if (q.side == Side::Upper) {
    if (mu <= 1.0) small_mu = mu * delta * delta / (2.0 * (1.0 + delta) * s);
    if (mu >= 1.0 && delta < 1.0) large_mu = mu * mu * delta * delta / (6.0 * s) * cubic;
  } else {
    if (mu <= 1.0) small_mu = mu * delta * delta / (6.0 * s) * cubic;
    if (mu >= 1.0) large_mu = mu * mu * delta * delta / (2.0 * s);
  }
  if (small_mu < 0.0 && large_mu < 0.0) {
    return detail::inapplicable(Method::Agrawal, Direction::UpperBoundsTail,
                                "case mu >= 1 and delta >= 1 not covered");
  }
  std::string notes;
  if (small_mu >= 0.0 && large_mu >= 0.0) notes = "mu = 1: both cases evaluated, tighter kept";
  return detail::upper_report(Method::Agrawal, q, std::max(small_mu, large_mu), std::move(notes));
}

namespace detail {

// Applicable upper bounds (tightest first), then certificates, then the rest.
inline int rank_group(const BoundReport& r) {
  if (!r.applicable) return 2;
  return r.direction == Direction::UpperBoundsTail ? 0 : 1;
}

}  // namespace detail

/// One report per method for the query, tightest applicable upper bound first.
inline std::vector<BoundReport> compare_all(const TailQuery& q,
                                            CertificateMode mode = CertificateMode::Repaired) {
  validate(q);
  std::vector<BoundReport> out;
  out.push_back(thm1_bound(q));
  if (q.family() == Family::Geometric) {
    out.push_back(janson_bound(q));
    out.push_back(agrawal_bound(q));
  } else {
    out.push_back(detail::inapplicable(Method::Janson, Direction::UpperBoundsTail,
                                       "geometric sums only"));
    out.push_back(detail::inapplicable(Method::Agrawal, Direction::UpperBoundsTail,
                                       "geometric sums only"));
  }
  const Method cert =
      mode == CertificateMode::PaperLiteral ? Method::CertificatePaper : Method::CertificateRepaired;
  try {
    out.push_back(certificate_bound(q, mode));
  } catch (const SideMismatch& e) {
    out.push_back(detail::inapplicable(cert, Direction::LowerBoundsTail, e.what()));
  } catch (const PreconditionError& e) {
    out.push_back(detail::inapplicable(cert, Direction::LowerBoundsTail, e.what()));
  }
  std::stable_sort(out.begin(), out.end(), [](const BoundReport& a, const BoundReport& b) {
    const int ga = detail::rank_group(a);
    const int gb = detail::rank_group(b);
    if (ga != gb) return ga < gb;
    return ga == 0 && a.log_bound < b.log_bound;
  });
  return out;
}

}  // namespace tailbounds
