#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/verify.hpp"

using namespace tailbounds;

namespace {

bool only_exponential_upper(const SuiteReport& r) {
  for (const auto& c : r.counterexamples) {
    if (c.query.family() != Family::Exponential || c.query.side != Side::Upper) return false;
    if (c.check != "certificate <= exact") return false;
  }
  return true;
}

GridSpec small_grid() {
  GridSpec g;
  g.mu_values = {0.1, 1.0, 10.0};
  g.lambda_values = {0.2, 0.5, 2.0, 5.0};
  g.n_values = {1, 2, 5};
  g.families = {Family::Geometric, Family::Exponential};
  g.sides = {Side::Upper, Side::Lower};
  return g;
}

}  // namespace

TEST(Grid, DefaultShape) {
  const GridSpec g = default_grid();
  EXPECT_EQ(g.mu_values.size(), 13u);
  EXPECT_NEAR(g.mu_values.front(), 0.01, 1e-15);
  EXPECT_NEAR(g.mu_values.back(), 100.0, 1e-12);
  EXPECT_EQ(g.lambda_values.size(), 14u);
  EXPECT_EQ(g.n_values.size(), 6u);
  EXPECT_NO_THROW(validate(g));
}

TEST(Grid, Malformed) {
  GridSpec g = small_grid();
  g.mu_values.clear();
  EXPECT_THROW(run_suite(Suite::Theorem1, g), DomainError);
  g = small_grid();
  g.lambda_values.push_back(-1.0);
  EXPECT_THROW(run_suite(Suite::Theorem1, g), DomainError);
  g = small_grid();
  g.n_values.push_back(0);
  EXPECT_THROW(validate(g), DomainError);
  EXPECT_THROW(run_suite(Suite::Theorem1, small_grid(), CertificateMode::Repaired, 0.0),
               DomainError);
}

TEST(Suites, SmallGridClean) {
  for (Suite s : {Suite::Theorem1, Suite::Proposition, Suite::Sandwich, Suite::Comparisons}) {
    const auto r = run_suite(s, small_grid());
    EXPECT_TRUE(r.counterexamples.empty()) << to_string(s);
    EXPECT_GT(r.points_checked, 0u) << to_string(s);
    EXPECT_EQ(r.suite, to_string(s));
    EXPECT_EQ(r.mode, "repaired");
  }
}

TEST(Suites, SkipsAreCounted) {
  const auto r = run_suite(Suite::Theorem1, small_grid());
  // half of the (lambda, side) pairs are side-mismatched
  EXPECT_EQ(r.points_checked + r.skipped, 3u * 4u * 3u * 2u * 2u);
  EXPECT_EQ(r.skipped, r.points_checked);
}

TEST(Suites, PaperModeRegression) {
  GridSpec g;
  g.mu_values = {1.0};
  g.lambda_values = {2.0};
  g.n_values = {1, 2, 3, 4, 5};
  g.families = {Family::Exponential};
  g.sides = {Side::Upper};
  const auto paper = run_suite(Suite::Sandwich, g, CertificateMode::PaperLiteral);
  EXPECT_GE(paper.counterexamples.size(), 2u);
  EXPECT_TRUE(only_exponential_upper(paper));
  EXPECT_EQ(paper.counterexamples.front().query.n, 1u);
  EXPECT_GT(paper.max_violation, 0.0);
  EXPECT_TRUE(run_suite(Suite::Sandwich, g, CertificateMode::Repaired).counterexamples.empty());
}

TEST(Suites, AllAggregates) {
  GridSpec g = small_grid();
  const auto all = run_suite(Suite::All, g);
  std::uint64_t points = 0;
  for (Suite s : {Suite::Theorem1, Suite::Proposition, Suite::Sandwich, Suite::Stirling,
                  Suite::Comparisons}) {
    points += run_suite(s, g).points_checked;
  }
  EXPECT_EQ(all.points_checked, points);
  EXPECT_EQ(all.suite, "all");
  EXPECT_TRUE(all.counterexamples.empty());
}

TEST(Suites, Deterministic) {
  const auto a = run_suite(Suite::Sandwich, small_grid(), CertificateMode::PaperLiteral);
  const auto b = run_suite(Suite::Sandwich, small_grid(), CertificateMode::PaperLiteral);
  ASSERT_EQ(a.counterexamples.size(), b.counterexamples.size());
  for (std::size_t i = 0; i < a.counterexamples.size(); ++i) {
    EXPECT_EQ(a.counterexamples[i].lhs_log, b.counterexamples[i].lhs_log);
    EXPECT_EQ(a.counterexamples[i].rhs_log, b.counterexamples[i].rhs_log);
  }
  EXPECT_EQ(a.max_violation, b.max_violation);
}

TEST(Suites, ToleranceControlsCounting) {
  GridSpec g;
  g.mu_values = {1.0};
  g.lambda_values = {2.0};
  g.n_values = {1};
  g.families = {Family::Exponential};
  g.sides = {Side::Upper};
  // the literal certificate misses by about 0.69 in log at n = 1
  EXPECT_EQ(run_suite(Suite::Sandwich, g, CertificateMode::PaperLiteral, 0.5)
                .counterexamples.size(),
            1u);
  EXPECT_TRUE(run_suite(Suite::Sandwich, g, CertificateMode::PaperLiteral, 1.0)
                  .counterexamples.empty());
}

TEST(Asymptotics, FrozenValues) {
  const double ns[] = {1, 10, 100, 1000, 2000};
  const double ratios[] = {8.1595186604227, 2.0500593408976, 1.1624555127190, 1.0228693267601,
                           1.0124500946057};
  for (int i = 0; i < 5; ++i) {
    const auto q = make_query(make_spec(Family::Geometric, 1.0), static_cast<std::uint64_t>(ns[i]),
                              2.0, Side::Upper);
    const auto r = asymptotic_ratio(q);
    EXPECT_NEAR(r.ratio, ratios[i], 1e-11) << ns[i];
    EXPECT_GE(r.ratio, 1.0);
    EXPECT_LE(r.ratio, r.certified_max);
  }
  const auto q100 = make_query(make_spec(Family::Geometric, 1.0), 100, 2.0, Side::Upper);
  EXPECT_NEAR(asymptotic_ratio(q100).certified_max, 1.3398774214911679367, 1e-12);
  const auto q2000 = make_query(make_spec(Family::Geometric, 1.0), 2000, 2.0, Side::Upper);
  EXPECT_NEAR(asymptotic_ratio(q2000).certified_max, 1.0214019776919632236, 1e-12);
}

TEST(Asymptotics, Errors) {
  const auto spec = make_spec(Family::Geometric, 1.0);
  EXPECT_THROW(asymptotic_ratio(make_query(spec, 5, 1.0, Side::Upper)), DomainError);
  EXPECT_THROW(asymptotic_ratio(make_query(spec, 5, 0.5, Side::Upper)), SideMismatch);
  EXPECT_THROW(asymptotic_ratio(make_query(spec, 1, 0.5, Side::Lower)), PreconditionError);
}

TEST(Asymptotics, IntervalHoldsOnDefaultGrid) {
  const GridSpec g = default_grid();
  std::uint64_t checked = 0;
  for (Family f : g.families) {
    for (Side s : g.sides) {
      for (double mu : g.mu_values) {
        for (double l : g.lambda_values) {
          for (std::uint64_t n : g.n_values) {
            const auto q = make_query(make_spec(f, mu), n, l, s);
            if (!side_consistent(q)) continue;
            AsymptoticRatio r;
            try {
              r = asymptotic_ratio(q);
            } catch (const PreconditionError&) {
              continue;
            } catch (const BudgetExceeded&) {
              continue;
            }
            ++checked;
            EXPECT_GE(r.ratio, 1.0 - 1e-9) << to_string(f) << " n=" << n << " "
                                           << tbtest::describe(l, mu);
            EXPECT_LE(r.ratio, r.certified_max * (1.0 + 1e-9))
                << to_string(f) << " n=" << n << " " << tbtest::describe(l, mu);
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 1500u);
}
