#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "support.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/numerics.hpp"

using namespace tailbounds;
using Quad = boost::multiprecision::cpp_bin_float_quad;

TEST(LnFactorial, SmallValues) {
  EXPECT_EQ(ln_factorial(0), 0.0);
  EXPECT_EQ(ln_factorial(1), 0.0);
  EXPECT_NEAR(ln_factorial(2), std::numbers::ln2, 1e-16);
  EXPECT_NEAR(ln_factorial(5), 4.7874917427820459942, 1e-14);
  EXPECT_NEAR(ln_factorial(10), 15.104412573075515295, 1e-13);
}

TEST(LnFactorial, MatchesLgamma) {
  for (std::uint64_t m : {3u, 17u, 100u, 1000u, 54321u}) {
    const double lg = std::lgamma(static_cast<double>(m) + 1.0);
    EXPECT_LT(tbtest::strict_rel_diff(ln_factorial(m), lg), 1e-13) << m;
  }
}

TEST(LnFactorial, CapIsEnforced) {
  EXPECT_THROW(ln_factorial(kLnFactorialCap + 1), BudgetExceeded);
  EXPECT_THROW(ln_factorial_sequence(kLnFactorialCap + 1), BudgetExceeded);
}

TEST(LnFactorial, SequenceIsBitIdentical) {
  const auto seq = ln_factorial_sequence(300);
  ASSERT_EQ(seq.size(), 301u);
  for (std::uint64_t m = 0; m <= 300; ++m) EXPECT_EQ(seq[m], ln_factorial(m)) << m;
}

TEST(LnFactorial, QuadPrecision) {
  const Quad v = ln_factorial<Quad>(10);
  EXPECT_LT(boost::multiprecision::abs(v - Quad("15.104412573075515295225709329251")),
            Quad("1e-30"));
}

TEST(Stirling, FrozenBrackets) {
  const auto b1 = stirling_bounds(1);
  EXPECT_NEAR(b1.lower, -0.0041383898722503351, 1e-15);
  EXPECT_NEAR(b1.upper, 0.0022718665380060751, 1e-15);
  EXPECT_TRUE(b1.contains(0.0));

  const auto b10 = stirling_bounds(10);
  EXPECT_NEAR(b10.lower, 15.104346472452069779, 1e-13);
  EXPECT_NEAR(b10.upper, 15.104415342975485757, 1e-13);
  EXPECT_TRUE(b10.contains(ln_factorial(10)));
}

TEST(Stirling, RejectsZero) { EXPECT_THROW(stirling_bounds(0), DomainError); }

TEST(Stirling, QuadContainmentSampled) {
  const auto table = ln_factorial_sequence<Quad>(100'000);
  tbtest::Gen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t m = gen.integer(1, 100'000);
    const auto b = stirling_bounds<Quad>(m);
    const Quad& v = table[m];
    EXPECT_TRUE(b.contains(v)) << m;
    EXPECT_LT(b.lower, b.upper);
  }
}

TEST(LnBinomial, Values) {
  EXPECT_EQ(ln_binomial(7, 0), 0.0);
  EXPECT_EQ(ln_binomial(7, 7), 0.0);
  EXPECT_NEAR(ln_binomial(5, 2), std::log(10.0), 1e-15);
  EXPECT_NEAR(ln_binomial(52, 5), std::log(2598960.0), 1e-13);
  EXPECT_THROW(ln_binomial(3, 4), DomainError);
}

TEST(LnBinomial, PropertySymmetryAndPascal) {
  tbtest::Gen gen(3);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t a = gen.integer(2, 5000);
    const std::uint64_t b = gen.integer(1, a - 1);
    EXPECT_EQ(ln_binomial(a, b), ln_binomial(a, a - b));
    // C(a, b) = C(a-1, b-1) + C(a-1, b)
    const double pascal = log_sum_exp({ln_binomial(a - 1, b - 1), ln_binomial(a - 1, b)});
    EXPECT_LT(tbtest::rel_diff(ln_binomial(a, b), pascal), 1e-12) << a << " " << b;
  }
}

TEST(LnBinomial, LargeArgumentAgreesWithLgamma) {
  const double a = 1e6;
  const double b = 3e5;
  const double lg = std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
  EXPECT_LT(tbtest::strict_rel_diff(ln_binomial(1'000'000, 300'000), lg), 1e-11);
}

TEST(Log1mexp, Values) {
  EXPECT_NEAR(log1mexp(-std::numbers::ln2), -std::numbers::ln2, 1e-16);
  EXPECT_NEAR(log1mexp(-1e-20), std::log(1e-20), 1e-12);
  EXPECT_NEAR(log1mexp(-50.0), -std::exp(-50.0), 1e-35);
  EXPECT_EQ(log1mexp(0.0), kNegInf);
}

TEST(LogSumExp, Basics) {
  EXPECT_NEAR(log_sum_exp({0.0, 0.0}), std::numbers::ln2, 1e-16);
  EXPECT_NEAR(log_sum_exp({-1000.0, -1000.0}), -1000.0 + std::numbers::ln2, 1e-12);
  EXPECT_NEAR(log_sum_exp({800.0, 0.0}), 800.0, 1e-12);
  EXPECT_EQ(log_sum_exp({kNegInf, kNegInf}), kNegInf);
  EXPECT_EQ(log_sum_exp({kNegInf, 3.0}), 3.0);
  EXPECT_THROW(log_sum_exp(std::span<const double>()), DomainError);
}

TEST(LogSumExp, StreamingMatchesBatch) {
  tbtest::Gen gen(5);
  for (int round = 0; round < 50; ++round) {
    std::vector<double> terms;
    LogSumAccumulator acc;
    const int count = static_cast<int>(gen.integer(1, 400));
    for (int i = 0; i < count; ++i) {
      terms.push_back(gen.uniform(-900.0, 900.0));
      acc.add(terms.back());
    }
    EXPECT_LT(tbtest::rel_diff(acc.value(), log_sum_exp(terms)), 1e-14);
    EXPECT_GE(log_sum_exp(terms), *std::max_element(terms.begin(), terms.end()));
  }
}

TEST(CompensatedSum, RecoversLostBits) {
  CompensatedSum<double> acc;
  acc.add(1.0);
  for (int i = 0; i < 1000; ++i) acc.add(1e-16);
  EXPECT_NEAR(acc.value(), 1.0 + 1e-13, 1e-16);
}
